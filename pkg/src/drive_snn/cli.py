"""Command line interface: ``drive-snn {synth,train,eval,predict}``.

Metric exports are CSV files with a header row:

* ``curves.csv``  epoch,train_loss,train_acc,test_loss,test_acc
* ``roc.csv``     fpr,tpr
* ``report.csv``  key,value
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from . import data, modelio
from .errors import EmptyDatasetError, ModelFormatError
from .metrics import confusion, roc_auc
from .numerics import Rng
from .snn import LifConfig, ModelConfig, SpikingNetwork
from .training import EvalResult, TrainConfig, TrainReport, evaluate, fit

logger = logging.getLogger("drive_snn")

CURVES_FILE = "curves.csv"
ROC_FILE = "roc.csv"
REPORT_FILE = "report.csv"


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_curves(path: Path, report: TrainReport) -> None:
    rows = [
        (epoch, _fmt(a), _fmt(b), _fmt(c), _fmt(d))
        for epoch, (a, b, c, d) in enumerate(
            zip(report.train_loss, report.train_accuracy, report.test_loss, report.test_accuracy), start=1
        )
    ]
    _write_csv(path, ("epoch", "train_loss", "train_acc", "test_loss", "test_acc"), rows)


def write_metrics(metrics_dir: Path, result: EvalResult, extra: dict) -> dict:
    """Write roc.csv and report.csv for one evaluation; returns the report dict."""
    cm = confusion(result.labels, result.predictions)
    report = {"n_samples": cm.total, "loss": result.loss, "accuracy": cm.accuracy}
    if len(np.unique(result.labels)) == 2:
        roc = roc_auc(result.labels, result.scores[:, 1])
        report["auc"] = roc.auc
        _write_csv(metrics_dir / ROC_FILE, ("fpr", "tpr"), [(_fmt(x), _fmt(y)) for x, y in roc.points])
    else:
        logger.warning("only one class present; AUC and ROC are undefined")
        report["auc"] = "nan"
        _write_csv(metrics_dir / ROC_FILE, ("fpr", "tpr"), [])
    report.update(tp=cm.tp, tn=cm.tn, fp=cm.fp, fn=cm.fn)
    report.update(extra)
    _write_csv(metrics_dir / REPORT_FILE, ("key", "value"), [(k, _fmt(v)) for k, v in report.items()])
    return report


def _summary(rep: dict) -> str:
    auc = rep["auc"] if isinstance(rep["auc"], str) else f"{rep['auc']:.4f}"
    return f"accuracy {rep['accuracy']:.4f}, auc {auc}, tp={rep['tp']} tn={rep['tn']} fp={rep['fp']} fn={rep['fn']}"


def cmd_synth(args) -> int:
    ds = data.synth_dataset(args.per_class, args.seed)
    written = data.write_dataset(ds, args.out)
    print(f"wrote {len(written)} images to {args.out}")
    return 0


def cmd_train(args) -> int:
    model_cfg = ModelConfig(
        hidden_size=args.hidden_size,
        num_steps=args.num_steps,
        lif=LifConfig(beta=args.beta, threshold=args.threshold, surrogate_slope=args.surrogate_slope),
    )
    train_cfg = TrainConfig(
        batch_size=args.batch_size,
        learning_rate=args.lr,
        epochs=args.epochs,
        patience=args.patience,
        weight_decay=args.weight_decay,
        seed=args.seed,
        encoding=args.encoding,
    )
    metrics_dir = Path(args.metrics)
    metrics_dir.mkdir(parents=True, exist_ok=True)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)

    ds = data.load_directory(args.vehicles, args.non_vehicles)
    train, test = data.split_shuffle(ds, args.seed, args.train_fraction)
    if len(test) == 0:
        raise EmptyDatasetError("test split is empty; add more images")
    print(f"loaded {len(ds)} images ({ds.class_counts[1]} vehicle, {ds.class_counts[0]} non-vehicle); "
          f"train {len(train)}, test {len(test)}")

    model = SpikingNetwork.initialize(model_cfg, Rng(args.seed).fork(0))
    print("epoch,train_loss,train_acc,test_loss,test_acc")

    def on_epoch(epoch, tr_loss, tr_acc, te_loss, te_acc):
        print(f"{epoch},{tr_loss:.4f},{tr_acc:.4f},{te_loss:.4f},{te_acc:.4f}", flush=True)

    best, report = fit(model, train, test, train_cfg, on_epoch)
    if report.stopped_epoch < train_cfg.epochs:
        print(f"early stop after epoch {report.stopped_epoch}; best epoch {report.best_epoch} "
              f"(test loss {report.best_loss:.4f})")
    else:
        print(f"finished {report.stopped_epoch} epochs; best epoch {report.best_epoch} "
              f"(test loss {report.best_loss:.4f})")

    meta = {"best_epoch": report.best_epoch, "best_test_loss": report.best_loss, "stopped_epoch": report.stopped_epoch}
    modelio.save_model(args.out, best, train_cfg, meta)
    write_curves(metrics_dir / CURVES_FILE, report)

    result = evaluate(best, test, train_cfg)
    extra = dict(meta)
    extra.update({f"train.{k}": v for k, v in dataclasses.asdict(train_cfg).items()})
    extra.update({f"model.{k}": v for k, v in dataclasses.asdict(model_cfg).items() if k != "lif"})
    extra.update({f"model.lif.{k}": v for k, v in dataclasses.asdict(model_cfg.lif).items()})
    rep = write_metrics(metrics_dir, result, extra)
    print("test " + _summary(rep))
    return 0


def _load(path):
    model, train_cfg, meta = modelio.load_model(path)
    return model, train_cfg or TrainConfig(), meta


def cmd_eval(args) -> int:
    model, train_cfg, meta = _load(args.model)
    if args.seed is not None:
        train_cfg = dataclasses.replace(train_cfg, seed=args.seed)
    ds = data.load_directory(args.vehicles, args.non_vehicles)
    metrics_dir = Path(args.metrics)
    metrics_dir.mkdir(parents=True, exist_ok=True)
    result = evaluate(model, ds, train_cfg)
    rep = write_metrics(metrics_dir, result, {"seed": train_cfg.seed})
    print(_summary(rep))
    return 0


def cmd_predict(args) -> int:
    model, train_cfg, _ = _load(args.model)
    if args.seed is not None:
        train_cfg = dataclasses.replace(train_cfg, seed=args.seed)
    pixels = data.preprocess(data.read_image(args.image))
    result = evaluate(model, data.Dataset(pixels[None], [0]), train_cfg)
    cls = int(result.predictions[0])
    print(f"{data.CLASS_NAMES[cls]} {result.scores[0, cls]:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drive-snn", description="Spiking network vehicle classifier")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic two-class PNG corpus")
    p.add_argument("--out", required=True, help="output directory (gets vehicle/ and non-vehicle/)")
    p.add_argument("--per-class", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser(
        "train",
        help="train on image directories",
        description="Train with early stopping. The test split is also the early-stopping monitor, "
        "so reported test metrics are optimistic.",
    )
    p.add_argument("--vehicles", required=True)
    p.add_argument("--non-vehicles", required=True)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--metrics", required=True, help="directory for curves/roc/report CSV files")
    p.add_argument("--batch-size", type=_positive_int, default=30)
    p.add_argument("--lr", type=_positive_float, default=1e-3)
    p.add_argument("--epochs", type=_positive_int, default=20)
    p.add_argument("--hidden-size", type=_positive_int, default=64)
    p.add_argument("--beta", type=float, default=0.95, help="membrane decay")
    p.add_argument("--num-steps", type=_positive_int, default=50)
    p.add_argument("--patience", type=_positive_int, default=5)
    p.add_argument("--weight-decay", type=float, default=1e-2)
    p.add_argument("--threshold", type=_positive_float, default=1.0)
    p.add_argument("--surrogate-slope", type=_positive_float, default=1.0)
    p.add_argument("--encoding", choices=("rate", "constant-current"), default="rate")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a saved model on image directories")
    p.add_argument("--model", required=True)
    p.add_argument("--vehicles", required=True)
    p.add_argument("--non-vehicles", required=True)
    p.add_argument("--metrics", required=True)
    p.add_argument("--seed", type=int, default=None, help="spike-encoding seed (default: the training seed)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="classify one image")
    p.add_argument("--model", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--seed", type=int, default=None, help="spike-encoding seed (default: the training seed)")
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, ModelFormatError) as exc:
        print(f"drive-snn {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
