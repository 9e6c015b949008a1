"""A single memoryless stage learns a pure static nonlinearity.

With the FIR part reduced to a single tap (order 0), a stage is just its
polynomial, so fitting t = x**3 recovers the cubic to machine precision.
This is the smallest possible demonstration that the gradient path
through the polynomial coefficients works: the filter solve alone cannot
do it, since the identity-initialized polynomial makes the stage linear.

Usage:
    python demos/static_cubic.py [--plot out.png]
"""

import argparse

import numpy as np

from gbfilt import TrainConfig, model_forward, nmse, train_separate


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--plot", help="save the learned curve to this path")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    x = rng.uniform(-1, 1, 256)
    target = x**3

    cfg = TrainConfig(
        stage_specs=((3, 0),),
        max_iters=500,
        tol=1e-16,
        learning_rate=0.05,
        weight_decay=0.0,
        ridge=0.0,
        seed=args.seed,
    )
    model, report = train_separate(x, target, cfg)
    stage = model.stages[0]

    print(f"ran {report.iterations[0]} gradient steps "
          f"({report.wall_clock:.2f} s)")
    print(f"training NMSE {nmse(model_forward(model, x), target):.3e}")
    print("learned coefficients (poly scaled by the single filter tap):")
    effective = stage.poly * stage.fir[0]
    for k, value in enumerate(effective):
        print(f"  x^{k}: {value:+.6f}")
    print("target coefficients:  x^3: +1, everything else 0")

    if args.plot:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not installed; skipping plot")
            return
        grid = np.linspace(-1, 1, 200)
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.plot(grid, grid**3, label="x^3")
        ax.plot(grid, model_forward(model, grid), ls="--", label="learned")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"saved plot to {args.plot}")


if __name__ == "__main__":
    main()
