"""Smoke test for the `antisync` extension module.

Run after `maturin develop` (or with the built library on PYTHONPATH):

    python python/smoke_test.py
"""

import math
import pathlib
import sys

import antisync

ROOT = pathlib.Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"


def main() -> int:
    p = antisync.product_split(1.5 - 2j, -0.25 + 3j)
    assert abs(p - (1.5 - 2j) * (-0.25 + 3j)) < 1e-12, p
    assert abs(antisync.eval_delay("logistic-shifted", 0.5, 0.0) - 0.25) < 1e-15

    s = antisync.Scenario.load(str(SCENARIOS / "paper_s4_controlled.toml"))
    report = s.verify()
    assert report["admissible"], report["verdict"]
    eta = [t["eta_bar_min"] for t in s.thresholds()]
    assert all(abs(a - b) < 1e-12 for a, b in zip(eta, [5.0, 6.6])), eta

    cert = s.certificate(0.25, 0.4)
    assert abs(cert["t1"] - (4 * math.log(8) + 1)) < 1e-12
    assert abs(cert["t2"] - 21.818) < 1e-3

    bounds = s.bounds(epsilon=0.25, rho=0.4)
    print("rho = 0.4 feasible:", bounds["supplied"]["rho_feasible"])

    traj = s.simulate(t_end=5.0)
    assert traj["settling_time"] is not None and traj["settling_time"] < 5.0
    assert max(traj["max_error"][-10:]) < 1e-2

    weak = antisync.Scenario.load(str(SCENARIOS / "paper_s4_weak_gains.toml"))
    assert not weak.verify()["admissible"]

    try:
        antisync.Scenario.from_toml(s.to_toml().replace("beta = 0.5", "beta = 1.5", 1))
    except ValueError as e:
        assert "E005" in str(e), e
    else:
        raise AssertionError("beta = 1.5 was accepted")

    print(f"ok: {s!r}, settling time {traj['settling_time']:.3f}, T2 = {cert['t2']:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
