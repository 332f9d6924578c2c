from typing import Any, Dict, List


class RunConfig000:
    # three-body GHZ benchmark
    target: Dict[str, Any] = {"family": "ghz"}
    n_sites = 3
    symmetry: Dict[str, Any] = {"kind": "three_body"}
    time_grid: List[Dict[str, float]] = [
        {"start": 1.4, "end": 1.7, "step": 0.1},
    ]
    restarts = 4
    seed = 7
