"""
Covariate Service Module
Dummy encoding of calendar contexts

Coordinate order:
    [intercept, Tue, Wed, Thu, Fri, Sat, Sun, hour0..hour11, hour13..hour23, holiday]
Monday and hour 12 are the reference categories (all dummies zero).
"""

from typing import Iterable, List

import numpy as np

from ..models.calendar import CalendarContext, CovariateVector, Weekday
from ..utils.constants import N_COVARIATES, REFERENCE_HOUR, WEEKDAYS

_WEEKDAY_OFFSET = 1
_HOUR_OFFSET = 7
_HOLIDAY_INDEX = N_COVARIATES - 1


class CovariateService:
    """Encodes (weekday, hour, holiday) as a 0-1 covariate vector"""

    def index_of_hour(self, hour: int) -> int:
        if hour == REFERENCE_HOUR:
            raise ValueError("the reference hour has no dummy")
        return _HOUR_OFFSET + (hour if hour < REFERENCE_HOUR else hour - 1)

    def encode_array(self, ctx: CalendarContext) -> np.ndarray:
        x = np.zeros(N_COVARIATES)
        x[0] = 1.0
        if ctx.weekday != Weekday.MON:
            x[_WEEKDAY_OFFSET + int(ctx.weekday) - 1] = 1.0
        if ctx.hour != REFERENCE_HOUR:
            x[self.index_of_hour(ctx.hour)] = 1.0
        if ctx.holiday:
            x[_HOLIDAY_INDEX] = 1.0
        return x

    def encode(self, ctx: CalendarContext) -> CovariateVector:
        return CovariateVector(values=self.encode_array(ctx).tolist())

    def encode_many(self, contexts: Iterable[CalendarContext]) -> np.ndarray:
        rows = [self.encode_array(ctx) for ctx in contexts]
        return np.vstack(rows) if rows else np.zeros((0, N_COVARIATES))

    def decode(self, vector: CovariateVector) -> CalendarContext:
        """Inverse of encode"""
        x = vector.as_array()
        weekday_hits = np.flatnonzero(x[_WEEKDAY_OFFSET:_HOUR_OFFSET])
        hour_hits = np.flatnonzero(x[_HOUR_OFFSET:_HOLIDAY_INDEX])
        if len(weekday_hits) > 1 or len(hour_hits) > 1:
            raise ValueError("more than one weekday or hour dummy set")
        weekday = Weekday(int(weekday_hits[0]) + 1) if len(weekday_hits) else Weekday.MON
        if len(hour_hits):
            k = int(hour_hits[0])
            hour = k if k < REFERENCE_HOUR else k + 1
        else:
            hour = REFERENCE_HOUR
        return CalendarContext(weekday=weekday, hour=hour, holiday=bool(x[_HOLIDAY_INDEX]))

    def coordinate_names(self) -> List[str]:
        names = ["intercept"] + WEEKDAYS[1:]
        names += [f"hour{h}" for h in range(24) if h != REFERENCE_HOUR]
        names.append("holiday")
        return names


# Global covariate service instance
covariate_service = CovariateService()
