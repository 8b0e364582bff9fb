"""
Fit Service Module
===================
Turns a passenger log into per-stop demand models.

LOG FORMAT:
----------
    date, weekday, hour, holiday, origin_stop, dest_stop[, count]
One row per passenger, or per (date, hour, origin, destination) with a
passenger count. Rows are checked before anything is fitted; errors name
the offending CSV line.

AGGREGATION:
-----------
Every (date, hour) slot between the first and the last logged date is an
observation for every origin stop, with a zero count when nobody boarded.
A date is a holiday when any of its rows says so. Destinations are fitted
on the passengers of each origin, with the most frequent destination as
the reference category.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..config import RegressionConfig, config
from ..models.calendar import CalendarContext, Weekday
from ..models.regression import StopModels
from ..utils.errors import ModelError, SchemaError
from ..utils.decorators import timed
from ..utils.logger import logger
from .covariate_service import covariate_service
from .regression_service import RegressionService

REQUIRED_COLUMNS = ["date", "weekday", "hour", "holiday", "origin_stop", "dest_stop"]
SUMMARY_COLUMNS = [
    "stop_id",
    "status",
    "n_slots",
    "n_passengers",
    "poisson_log_likelihood",
    "poisson_iterations",
    "poisson_converged",
    "poisson_penalized",
    "n_destinations",
    "destination_log_likelihood",
    "destination_converged",
]

_TRUE = {"1", "true", "yes", "y", "t"}
_FALSE = {"0", "false", "no", "n", "f"}


class FitService:
    """Log validation, slot aggregation and per-stop model fitting"""

    def __init__(self, settings: Optional[RegressionConfig] = None):
        self.settings = settings or config.regression
        self.regression = RegressionService(self.settings)

    # ==================== LOG ====================

    def read_log(self, path: Union[str, Path]) -> pd.DataFrame:
        try:
            frame = pd.read_csv(path, dtype=str)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise SchemaError(f"cannot read trip log {path}", details=str(e))
        return self.validate_log(frame)

    def validate_log(self, frame: pd.DataFrame) -> pd.DataFrame:
        """Typed copy of the log; raises SchemaError naming the CSV line"""
        missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
        if missing:
            raise SchemaError(f"trip log lacks columns {missing}")
        if frame.empty:
            raise SchemaError("trip log is empty")

        rows = []
        for k, row in enumerate(frame.to_dict("records")):
            line = k + 2
            try:
                day = pd.Timestamp(str(row["date"])).date()
                weekday = Weekday.parse(row["weekday"])
                hour = int(row["hour"])
                holiday = self._flag(row["holiday"])
                origin, dest = int(row["origin_stop"]), int(row["dest_stop"])
                count = int(row["count"]) if "count" in row and pd.notna(row["count"]) else 1
            except (ValueError, TypeError) as e:
                raise SchemaError(f"trip log line {line}: {e}")
            if not 0 <= hour <= 23:
                raise SchemaError(f"trip log line {line}: hour {hour} outside 0..23")
            if weekday != Weekday(day.weekday()):
                raise SchemaError(f"trip log line {line}: {day} is not a {weekday.name.title()}")
            if count < 0:
                raise SchemaError(f"trip log line {line}: negative count")
            if origin == dest:
                raise SchemaError(f"trip log line {line}: origin equals destination")
            rows.append((day, hour, holiday, origin, dest, count))
        typed = pd.DataFrame(rows, columns=["date", "hour", "holiday", "origin_stop", "dest_stop", "count"])
        return typed[typed["count"] > 0].reset_index(drop=True)

    @staticmethod
    def _flag(value) -> bool:
        text = str(value).strip().lower()
        if text in _TRUE:
            return True
        if text in _FALSE:
            return False
        raise ValueError(f"holiday flag {value!r} is not boolean")

    def slot_design(self, log: pd.DataFrame) -> Tuple[pd.DataFrame, np.ndarray]:
        """All (date, hour) slots of the logged date range and their covariates"""
        holidays = set(log.loc[log["holiday"], "date"])
        dates = pd.date_range(log["date"].min(), log["date"].max(), freq="D").date
        slots = pd.DataFrame([(d, h) for d in dates for h in range(24)], columns=["date", "hour"])
        X = covariate_service.encode_many(
            CalendarContext(weekday=Weekday(d.weekday()), hour=h, holiday=d in holidays)
            for d, h in zip(slots["date"], slots["hour"])
        )
        return slots, X

    # ==================== FITTING ====================

    @timed
    def fit_log(self, log: pd.DataFrame, parallel: Optional[bool] = None) -> Tuple[Dict[int, StopModels], pd.DataFrame]:
        """Fit every origin stop; stops whose fit fails are reported and skipped"""
        if log.empty:
            raise SchemaError("trip log has no passengers")
        slots, X = self.slot_design(log)
        slot_index = {key: k for k, key in enumerate(zip(slots["date"], slots["hour"]))}
        log = log.assign(slot=[slot_index[(d, h)] for d, h in zip(log["date"], log["hour"])])
        origins = sorted(int(s) for s in log["origin_stop"].unique())
        groups = {stop: part for stop, part in log.groupby("origin_stop")}

        def work(stop: int):
            return self.fit_stop(stop, groups[stop], X)

        parallel = self.settings.parallel if parallel is None else parallel
        if parallel and len(origins) > 1:
            with ThreadPoolExecutor(max_workers=self.settings.workers) as pool:
                results = list(pool.map(work, origins))
        else:
            results = [work(stop) for stop in origins]

        models = {stop: item for stop, (item, _) in zip(origins, results) if item is not None}
        summary = pd.DataFrame([row for _, row in results], columns=SUMMARY_COLUMNS)
        logger.info(f"Fitted {len(models)} of {len(origins)} stops")
        return models, summary

    def fit_stop(self, stop: int, rows: pd.DataFrame, X: np.ndarray) -> Tuple[Optional[StopModels], dict]:
        y = np.bincount(rows["slot"].to_numpy(), weights=rows["count"].to_numpy(), minlength=X.shape[0])
        totals = rows.groupby("dest_stop")["count"].sum()
        categories = sorted(totals.index.astype(int), key=lambda d: (-totals[d], d))
        label_of = {d: k for k, d in enumerate(categories)}
        summary = {"stop_id": stop, "n_slots": int(X.shape[0]), "n_passengers": int(y.sum()),
                   "n_destinations": len(categories)}
        try:
            poisson, p_report = self.regression.fit_poisson_arrays(X, y, stop_id=stop)
            repeats = rows["count"].to_numpy()
            Xd = np.repeat(X[rows["slot"].to_numpy()], repeats, axis=0)
            labels = np.repeat([label_of[int(d)] for d in rows["dest_stop"]], repeats)
            destination, d_report = self.regression.fit_multinomial_arrays(Xd, labels, categories, stop_id=stop)
        except ModelError as e:
            logger.warning(f"Stop {stop}: fit failed ({e.code}): {e.message}")
            return None, {**summary, "status": e.code}

        if not (p_report.converged and d_report.converged):
            logger.warning(f"Stop {stop}: fit stopped before convergence")
        summary.update({
            "status": "ok",
            "poisson_log_likelihood": p_report.log_likelihood,
            "poisson_iterations": p_report.iterations,
            "poisson_converged": p_report.converged,
            "poisson_penalized": p_report.penalized,
            "destination_log_likelihood": d_report.log_likelihood,
            "destination_converged": d_report.converged,
        })
        item = StopModels(
            stop_id=stop,
            poisson=poisson,
            destination=destination,
            poisson_report=p_report,
            destination_report=d_report,
        )
        return item, summary


# Global fit service instance
fit_service = FitService()
