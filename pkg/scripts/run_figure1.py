#!/usr/bin/env python3
"""Run the flagship relaxation experiment and optionally render the figure.

Produces density.csv (snapshot densities), trajectory.csv (discrete learner
inset), and meta.json in the output directory, then -- if matplotlib is
importable -- draws the two data files as one figure: the density panel with
the trajectory inset, saved alongside the data.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from quantum_descent.config import default_config, load_config
from quantum_descent.experiments import run_experiment
from quantum_descent.output import read_table


def render(out_dir: Path) -> Path | None:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping the rendered figure")
        return None

    _, density = read_table(out_dir / "density.csv")
    _, traj = read_table(out_dir / "trajectory.csv")
    x = density[:, 0]

    fig, ax = plt.subplots(figsize=(7, 4.2))
    n_snap = density.shape[1] - 1
    for k in range(n_snap):
        shade = 0.25 + 0.75 * k / max(n_snap - 1, 1)
        ax.plot(x, density[:, 1 + k], color=(0.1, 0.2, 0.6, shade), lw=1.2)
    ax.set_xlabel("x")
    ax.set_ylabel(r"$\rho(x)$")
    ax.set_xlim(-9, 4)
    ax.set_title("density relaxing toward the trap minimum")

    inset = ax.inset_axes([0.62, 0.55, 0.35, 0.4])
    inset.plot(traj[:, 0], traj[:, 1], "k.-", ms=3, lw=0.8)
    inset.set_xlabel("step", fontsize=8)
    inset.set_ylabel(r"$x_t$", fontsize=8)
    inset.tick_params(labelsize=7)

    path = out_dir / "figure1.png"
    fig.savefig(path, dpi=160, bbox_inches="tight")
    plt.close(fig)
    return path


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=None, help="YAML config (figure1 defaults if omitted)")
    ap.add_argument("--out", default="out/figure1", help="output directory")
    ap.add_argument("--no-plot", action="store_true")
    args = ap.parse_args()

    cfg = load_config(args.config, "figure1") if args.config else default_config("figure1")
    result = run_experiment(cfg, out_dir=args.out)
    meta = result.meta
    print(f"status: {meta['status']}")
    print(f"density argmax: {meta['density_argmax_first']:+.4f} -> "
          f"{meta['density_argmax_last']:+.4f}")
    print(f"learner: {meta['learner']['outcome']} after {meta['learner']['steps_taken']} "
          f"steps, final x = {meta['learner']['final_x']:.3e}")
    if not args.no_plot and result.exit_code == 0:
        fig_path = render(result.out_dir)
        if fig_path:
            print(f"figure: {fig_path}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
