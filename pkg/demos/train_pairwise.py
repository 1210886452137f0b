"""Train the pairwise witness from the stock starting point and probe it
with states the training set never saw."""
import argparse

from qnnwitness import (
    IntegratorConfig,
    TrainConfig,
    bundled_schedule,
    evaluate,
    load_dataset,
    train,
)

# matched EPR pair vs the two mismatched detectors, then the product-state
# controls and the partially entangled probes
HELD_OUT = (
    "EPR_AB", "EPR_AC", "EPR_BC",
    "F1", "F2", "F3", "M",
    "Pprime_AB", "Pprime_AC", "Pprime_BC",
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--epochs", type=int, default=5000)
    ap.add_argument("--lr", type=float, default=3e-3)
    ap.add_argument("--out", help="write the trained parameters here")
    args = ap.parse_args()

    ds = load_dataset("set1")
    cfg = TrainConfig(epochs=args.epochs, learning_rate=args.lr,
                      momentum=0.9, dt=0.25)
    trained, history = train(ds, bundled_schedule("initial"), cfg)

    for epoch in range(0, len(history), max(1, len(history) // 10)):
        print(f"epoch {epoch:>6}  rms {history[epoch]:.6f}")
    print(f"final rms {history[-1]:.6f} after {len(history)} epochs")

    fine = IntegratorConfig(0.05)
    print(f"\n{'state':<12} {'AB':>8} {'AC':>8} {'BC':>8} {'ABC':>8}")
    for name in HELD_OUT:
        r = evaluate(name, trained, fine)
        vals = " ".join(f"{r.outputs[k]:8.4f}" for k in ("AB", "AC", "BC", "ABC"))
        print(f"{name:<12} {vals}")

    if args.out:
        from qnnwitness import save_schedule
        save_schedule(trained, args.out)
        print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
