"""Run a fine-tune + evaluation from split manifests.

Example (full scale, needs pretrained weights and ideally a GPU):

    python -m aefinetune --splits run/splits --arch efficientnet_b5 \
        --loss pom1b --epochs 3 --batch-size 8 --lr-max 0.01 --out run/ft
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .finetune import FinetuneConfig, evaluate, finetune, save_result
from .losses import LOSS_KINDS
from .metrics import write_metrics_json
from .models import ARCHITECTURES


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="aefinetune", description=__doc__)
    parser.add_argument("--splits", required=True,
                        help="directory with train/val/test.jsonl from `aepipeline dataset build`")
    parser.add_argument("--arch", choices=ARCHITECTURES, default="efficientnet_b5")
    parser.add_argument("--loss", choices=LOSS_KINDS, default="pom1b")
    parser.add_argument("--freeze", action="store_true")
    parser.add_argument("--no-pretrained", action="store_true",
                        help="random init instead of ImageNet weights (for offline smoke runs)")
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--lr-max", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--workers", type=int, default=0)
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    splits = Path(args.splits)
    cfg = FinetuneConfig(
        architecture=args.arch,
        freeze=args.freeze,
        loss=args.loss,
        lr_max=args.lr_max,
        batch_size=args.batch_size,
        epochs=args.epochs,
        seed=args.seed,
        pretrained=not args.no_pretrained,
        device=args.device,
        num_workers=args.workers,
    )
    try:
        result = finetune(cfg, splits / "train.jsonl", splits / "val.jsonl")
        report = evaluate(result.model, splits / "test.jsonl", device=args.device)
    except Exception as exc:  # noqa: BLE001 - single structured failure path
        print(f'{{"error": "{type(exc).__name__}", "message": "{exc}"}}', file=sys.stderr)
        return 1
    out = Path(args.out)
    save_result(result, out)
    write_metrics_json(report, out / "metrics.json")
    print(f"test acc {report['acc']:.4f}, acc_pm1 {report['acc_pm1']:.4f}, "
          f"f1_pm1 {report['f1_pm1']:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
