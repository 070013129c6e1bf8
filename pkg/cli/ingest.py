"""
CSV ingestion: responses, numeric predictors and treatment-coded factors.

Factor levels are the distinct cell strings sorted alphabetically; the first
is the reference level and gets no column. Dummy columns are named
``<column><level>`` (``cyl6``, ``am1``). The intercept column, when
requested, comes first and is named ``(Intercept)``.
"""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from core.exceptions import EmptyData, InvalidConfiguration, InvalidDataset, MissingColumn, NonNumericCell, \
    RankDeficientAfterEncoding
from regression.structures import Dataset

logger = logging.getLogger(__name__)

INTERCEPT = '(Intercept)'


def read_table(path):
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8', skipinitialspace=True)
    except pd.errors.EmptyDataError as exc:
        raise EmptyData(f"{path} has no header row") from exc
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as exc:
        raise InvalidDataset(f"cannot read {path}: {exc}") from exc
    frame.columns = [str(column).strip() for column in frame.columns]
    if frame.empty:
        raise EmptyData(f"{path} has a header but no data rows")
    return frame


def numeric_column(frame, column):
    """Parse one column as finite decimal reals, reporting the first bad cell."""
    cells = frame[column].str.strip()
    values = pd.to_numeric(cells, errors='coerce').to_numpy(dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise NonNumericCell(row + 1, column, cells.iloc[row])
    return values


def treatment_columns(frame, column):
    cells = frame[column].str.strip()
    levels = sorted(cells.unique())
    if len(levels) < 2:
        raise RankDeficientAfterEncoding(f"factor '{column}' has a single level {levels!r}")
    dummies = pd.get_dummies(cells).reindex(columns=levels[1:]).astype(float)
    names = [f"{column}{level}" for level in levels[1:]]
    return dummies.to_numpy(), names, {'levels': levels, 'reference': levels[0]}


def _rank_check(X, dummy_columns):
    """
    Rank deficiency is an ingestion error only when the factor dummies cause
    it; a singular numeric block is left to ``fit_ols``.
    """
    if not dummy_columns:
        return
    rank = np.linalg.matrix_rank(X)
    if rank == X.shape[1]:
        return
    base = np.delete(X, dummy_columns, axis=1)
    if base.shape[1] and np.linalg.matrix_rank(base) < base.shape[1]:
        return
    raise RankDeficientAfterEncoding(
        f"design has {X.shape[1]} columns but rank {rank} once the factor dummies are added"
    )


def ingest_csv(path, responses, predictors, factors=(), intercept=True):
    responses, predictors, factors = list(responses), list(predictors), list(factors)
    if not responses:
        raise InvalidConfiguration("at least one response column is required")
    overlap = set(responses) & set(predictors)
    if overlap:
        raise InvalidConfiguration(f"columns used as both response and predictor: {', '.join(sorted(overlap))}")
    stray = [f for f in factors if f not in predictors]
    if stray:
        raise InvalidConfiguration(f"factor columns must also be predictors: {', '.join(stray)}")

    frame = read_table(path)
    missing = [c for c in responses + predictors if c not in frame.columns]
    if missing:
        raise MissingColumn(f"{Path(path).name} has no column(s) {', '.join(missing)}")

    Y = np.column_stack([numeric_column(frame, c) for c in responses])
    blocks, names, encodings, dummy_columns = [], [], {}, []
    if intercept:
        blocks.append(np.ones((len(frame), 1)))
        names.append(INTERCEPT)
    for column in predictors:
        if column in factors:
            values, dummy_names, encodings[column] = treatment_columns(frame, column)
            dummy_columns.extend(range(len(names), len(names) + len(dummy_names)))
            blocks.append(values)
            names.extend(dummy_names)
        else:
            blocks.append(numeric_column(frame, column).reshape(-1, 1))
            names.append(column)
    if not blocks:
        raise InvalidConfiguration("the design has no columns: give predictors or keep the intercept")
    X = np.hstack(blocks)

    _rank_check(X, dummy_columns)
    logger.info(f"Ingested {path}: n={X.shape[0]}, p={X.shape[1]}, r={Y.shape[1]}")
    metadata = {
        'source': str(path),
        'intercept': bool(intercept),
        'coding': 'treatment',
        'factors': encodings,
    }
    return Dataset(X, Y, tuple(names), tuple(responses), metadata)
