"""Weight superposition and the feasibility guarantee, by brute force.

Any weight profile in [0, 1] blends the left and right boundary into a
target path, and the pure-pursuit layer tracks it under curvature and
acceleration limits. Here adversarial square-wave weights and bang-bang
accelerations try to break the limits; the rollout stays feasible anyway.
"""
import numpy as np

from lanebound import boundary_set_for, feasibility_check, make_scenario, rollout, superimpose


def main():
    scenario = make_scenario(3, "curved")
    boundary = boundary_set_for(scenario)[0]
    n = len(boundary.midline)
    rng = np.random.default_rng(0)

    profiles = {
        "centerline": np.full(n, 0.5),
        "hug left":   np.full(n, 1.0),
        "square wave": (np.arange(n) // 8 % 2).astype(float),
        "white noise": rng.uniform(0.0, 1.0, n),
    }
    accels = {
        "coast":     np.zeros(60),
        "bang-bang": 8.0 * np.where(np.arange(60) % 10 < 5, 1.0, -1.0),
    }

    print(f"{'weights':<12} {'accels':<10} {'len [m]':>8} {'max|kappa|':>11} "
          f"{'max|a|':>7} feasible")
    for wname, w in profiles.items():
        path = superimpose(boundary, w)
        for aname, a in accels.items():
            traj = rollout(scenario.focal_agent, path, a)
            flags = feasibility_check(traj)
            dist = np.linalg.norm(np.diff(traj.xy, axis=0), axis=1)
            kappa = np.abs(np.diff(traj.headings)) / np.maximum(dist, 1e-9)
            accel = np.abs(np.diff(traj.speeds)) / traj.dt
            print(f"{wname:<12} {aname:<10} {dist.sum():8.1f} {kappa.max():11.4f} "
                  f"{accel.max():7.2f} {not flags.infeasible}")

    print("\nevery rollout respects |kappa| <= 0.3 and |a| <= 8 by construction")


if __name__ == "__main__":
    main()
