"""How closely can the constrained tracker imitate a known future?

Builds a ground truth by rolling out hidden weight and acceleration
profiles, then fits profiles back from the trajectory alone. The fitted
ADE is the displacement floor for any predictor built on the same tracker;
the descent's error sequence is monotone by construction.
"""
import numpy as np

from lanebound import boundary_set_for, make_scenario, rollout, superimpose
from lanebound.fitting import fit, project_gt


def main():
    scenario = make_scenario(77, "curved")
    boundary = boundary_set_for(scenario)[0]
    n = len(boundary.midline)

    rng = np.random.default_rng(5)
    hidden_w = np.clip(0.5 + 0.3 * np.sin(np.arange(n) / 25.0), 0.1, 0.9)
    hidden_a = np.convolve(rng.uniform(-1.5, 1.5, 60), np.ones(10) / 10.0, mode="same")
    gt = rollout(scenario.focal_agent, superimpose(boundary, hidden_w), hidden_a)
    print(f"hidden profiles -> ground truth covering "
          f"{np.linalg.norm(np.diff(gt.xy, axis=0), axis=1).sum():.1f} m")

    w0, a0 = project_gt(boundary, gt)
    print(f"projection initial guess: weight range "
          f"[{w0.min():.2f}, {w0.max():.2f}], accel range [{a0.min():.2f}, {a0.max():.2f}]")

    result = fit(boundary, gt)
    print("\nade after each halving iteration:")
    for i, ade in enumerate(result.ade_history):
        print(f"  {i}: {ade:.4f} m")
    print(f"\nfinal ADE {result.ade:.4f} m over a 6 s horizon")
    err_w = np.abs(result.weights - hidden_w).mean()
    print(f"mean |fitted - hidden| weight error: {err_w:.3f}")
    print("the fit matches the trajectory, not necessarily the exact profiles:")
    print("distinct weight profiles can produce nearly identical tracked paths")


if __name__ == "__main__":
    main()
