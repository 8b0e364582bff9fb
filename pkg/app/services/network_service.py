"""
Network Service Module
Builds and loads stop networks
"""

from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from ..config import NetworkConfig, config
from ..models.network import StopNetwork
from ..utils.constants import DEPOT, TRAVEL_TIME_INTERCEPT, TRAVEL_TIME_SLOPE
from ..utils.errors import SchemaError
from ..utils.helpers import keyed_rng
from ..utils.logger import logger

STOP_COLUMNS = ["stop_id", "x_km", "y_km"]


class NetworkService:
    """Stop networks with detour-scaled Euclidean costs"""

    def __init__(self, settings: Optional[NetworkConfig] = None):
        self.settings = settings or config.network

    def travel_time_from_cost(self, c_km):
        """t = 2.3634 c + 0.2086 minutes; self-loops (c = 0) take no time"""
        c = np.asarray(c_km, dtype=float)
        if np.any(c < 0):
            raise ValueError("costs must be nonnegative")
        t = np.where(c > 0, TRAVEL_TIME_SLOPE * c + TRAVEL_TIME_INTERCEPT, 0.0)
        return float(t) if t.ndim == 0 else t

    def from_coordinates(
        self,
        coords: Dict[int, Tuple[float, float]],
        detour: Optional[float] = None,
        depot_at_centroid: bool = True,
    ) -> StopNetwork:
        detour = self.settings.detour_factor if detour is None else detour
        points = dict(coords)
        if DEPOT not in points:
            if not depot_at_centroid:
                raise SchemaError("network has no depot stop 0")
            points[DEPOT] = tuple(np.mean(list(coords.values()), axis=0))
        ids = tuple(sorted(points))
        xy = np.array([points[s] for s in ids], dtype=float)
        cost = detour * cdist(xy, xy)
        return self._finish(ids, xy, cost)

    def build_synthetic_network(
        self, n_stops: Optional[int] = None, extent_km: Optional[float] = None, seed: Optional[int] = None
    ) -> StopNetwork:
        n_stops = self.settings.n_stops if n_stops is None else n_stops
        extent_km = self.settings.extent_km if extent_km is None else extent_km
        seed = self.settings.seed if seed is None else seed
        if n_stops < 2:
            raise ValueError("a network needs at least two stops")
        rng = keyed_rng(seed, n_stops)
        xy = rng.uniform(0.0, extent_km, size=(n_stops, 2))
        coords = {k + 1: (float(x), float(y)) for k, (x, y) in enumerate(xy)}
        net = self.from_coordinates(coords)
        logger.info(f"Built synthetic network: {n_stops} stops in {extent_km:g} km square")
        return net

    def _finish(self, ids, xy: np.ndarray, cost: np.ndarray) -> StopNetwork:
        np.fill_diagonal(cost, 0.0)
        if not np.all(np.isfinite(cost)) or np.any(cost < 0):
            raise SchemaError("costs must be finite and nonnegative")
        time = self.travel_time_from_cost(cost)
        for name, matrix in (("cost", cost), ("time", time)):
            violation = self.triangle_violation(matrix)
            assert violation <= 1e-9, f"{name} matrix violates the triangle inequality by {violation:g}"
        return StopNetwork(stop_ids=tuple(int(s) for s in ids), coords=xy, cost=cost, time=time)

    @staticmethod
    def triangle_violation(matrix: np.ndarray) -> float:
        """max over i, j, k of m[i, j] - m[i, k] - m[k, j]"""
        worst = 0.0
        for k in range(matrix.shape[0]):
            via = matrix[:, k:k + 1] + matrix[k:k + 1, :]
            worst = max(worst, float(np.max(matrix - via)))
        return worst

    # ==================== FILES ====================

    def load_network(self, stops_csv: Union[str, Path], cost_csv: Union[str, Path, None] = None) -> StopNetwork:
        try:
            stops = pd.read_csv(stops_csv)
        except (OSError, pd.errors.ParserError) as e:
            raise SchemaError(f"cannot read stops file {stops_csv}", details=str(e))
        missing = [c for c in STOP_COLUMNS if c not in stops.columns]
        if missing:
            raise SchemaError(f"stops file lacks columns {missing}")
        coords = {int(r.stop_id): (float(r.x_km), float(r.y_km)) for r in stops.itertuples()}
        if not cost_csv:
            return self.from_coordinates(coords)

        matrix = pd.read_csv(cost_csv, index_col=0)
        matrix.columns = [int(c) for c in matrix.columns]
        matrix.index = [int(i) for i in matrix.index]
        if DEPOT not in coords:
            raise SchemaError("an external cost matrix needs the depot (stop 0) in the stops file")
        ids = tuple(sorted(coords))
        try:
            cost = matrix.loc[list(ids), list(ids)].to_numpy(dtype=float)
        except KeyError as e:
            raise SchemaError("cost matrix does not cover every stop", details=str(e))
        xy = np.array([coords[s] for s in ids], dtype=float)
        logger.info(f"Loaded network with external costs: {len(ids)} stops")
        return self._finish(ids, xy, cost.copy())

    def save_network(self, net: StopNetwork, directory: Union[str, Path]) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / "stops.csv"
        frame = pd.DataFrame(
            {"stop_id": net.stop_ids, "x_km": net.coords[:, 0], "y_km": net.coords[:, 1]}
        )
        frame.to_csv(path, index=False)
        return path

    def load_configured(self) -> StopNetwork:
        """Network from the configured files, or the synthetic one"""
        if self.settings.stops_csv:
            return self.load_network(self.settings.stops_csv, self.settings.cost_csv or None)
        return self.build_synthetic_network()


# Global network service instance
network_service = NetworkService()
