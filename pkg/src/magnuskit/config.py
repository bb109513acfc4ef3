"""Run-wide tunables for the metric and conjugacy machinery."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class RunConfig:
    """Exactness thresholds and search caps.

    travel_exact_max: largest support size for which the travel cost is
        solved exactly (subset dynamic program); larger supports fall back
        to nearest-neighbour + 2-opt and carry an upper-bound flag.
    bfs_cap: default Cayley-graph BFS radius for groups without a
        closed-form metric.
    walk_cost_cap / walk_node_cap: ceilings for the 0/1-weight search that
        connects flow-support components in the geodesic-length formula.
    z_scan_slack: extra base-part radius scanned for conjugate pairs whose
        lamp part can be conjugated away; covers short-conjugator bounds of
        the base group when it is not abelian or finite.
    """

    travel_exact_max: int = 9
    bfs_cap: int = 8
    walk_cost_cap: int = 64
    walk_node_cap: int = 200_000
    z_scan_slack: int = 0
    seed: int = 0
    jobs: int = 1

    def with_(self, **kw) -> "RunConfig":
        return replace(self, **kw)


DEFAULT = RunConfig()
