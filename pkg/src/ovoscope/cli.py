"""Command line interface: ``ovoscope <subcommand> [options]``.

Exit codes: 0 ok, 1 usage, 2 I/O, 3 validation, 4 training did not converge
(outputs are still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .enhancement import ENHANCE_MODES, ClaheConfig
from .errors import ConfigError, NetpbmError, OvoscopeError
from .evaluation import percent_str, scenario_report
from .pipeline import (
    ImageProcessingError,
    PipelineConfig,
    extract_all,
    load_manifest,
    preprocess_one,
    read_csv,
    save_manifest,
    split,
    to_samples,
    write_csv,
)
from .raster import write_image
from .segmentation import DEFAULT_THRESHOLD
from .svm import LABEL_NAMES, TrainConfig, load_model, predict, save_model, train_smo
from .synthgen import generate_dataset

log = logging.getLogger("ovoscope")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VALIDATION, EXIT_CONVERGENCE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _tiles(text: str) -> tuple[int, int]:
    try:
        tx, ty = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"tiles must look like 8x8, got {text!r}") from None
    return tx, ty


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=1, help="master seed (synth, split, SVM)")
    g.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD,
                   help="segmentation threshold (default %(default)s)")
    g.add_argument("--enhance", choices=ENHANCE_MODES, default="clahe-he")
    g.add_argument("--tiles", type=_tiles, default=(8, 8), help="CLAHE grid, e.g. 8x8")
    g.add_argument("--alpha", type=float, default=40.0, help="CLAHE clip factor in [1, 100]")
    g.add_argument("--smax", type=float, default=4.0, help="CLAHE maximum slope")
    g.add_argument("--c", type=float, default=1.0, help="SVM penalty")
    g.add_argument("--standardize", action="store_true",
                   help="z-score features before training (off by default)")
    g.add_argument("--workers", type=int, default=1, help="threads for per-image work")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def _config(args) -> PipelineConfig:
    tx, ty = args.tiles
    return PipelineConfig(
        threshold=args.threshold,
        clahe=ClaheConfig(tiles_x=tx, tiles_y=ty, alpha=args.alpha, s_max=args.smax),
        enhance_mode=args.enhance,
        svm=TrainConfig(c=args.c, seed=args.seed, standardize=args.standardize),
        train_fraction=getattr(args, "train_fraction", 0.5),
        split_seed=args.seed,
        workers=args.workers,
    )


def _failure_code(failures) -> int:
    if any(isinstance(f.cause, (OSError, NetpbmError)) for f in failures):
        return EXIT_IO
    return EXIT_VALIDATION


# --- subcommands ------------------------------------------------------------

def cmd_synth(args) -> int:
    manifest = generate_dataset(args.fertile, args.infertile, args.seed, args.out, hard=args.hard)
    print(f"wrote {len(manifest)} images and manifest.json to {args.out}")
    return EXIT_OK


def cmd_preprocess(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = [e.path for e in load_manifest(args.manifest)] if args.manifest else args.images
    failures = []
    for path in paths:
        try:
            gray = preprocess_one(path, cfg)
        except ImageProcessingError as exc:
            log.error("%s", exc)
            failures.append(exc)
            continue
        write_image(out / (Path(path).stem + ".pgm"), gray)
    return _failure_code(failures) if failures else EXIT_OK


def cmd_extract(args) -> int:
    cfg = _config(args)
    rows, failures = extract_all(load_manifest(args.manifest), cfg)
    write_csv(rows, args.out)
    print(f"wrote {len(rows)} feature rows to {args.out}")
    if failures:
        log.error("%d image(s) skipped", len(failures))
        return _failure_code(failures)
    return EXIT_OK


def cmd_split(args) -> int:
    entries = load_manifest(args.manifest)
    train, test = split(entries, args.seed, args.train_fraction)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_manifest(train, out / "train.json")
    save_manifest(test, out / "test.json")
    print(f"train {len(train)} / test {len(test)} -> {out}")
    return EXIT_OK


def _train(rows, cfg: PipelineConfig):
    model = train_smo(to_samples(rows), cfg.svm)
    return model, EXIT_OK if model.converged else EXIT_CONVERGENCE


def cmd_train(args) -> int:
    model, code = _train(read_csv(args.features), _config(args))
    save_model(model, args.model)
    print(f"model written to {args.model} (converged={model.converged})")
    return code


def _predict_rows(model, rows):
    for r in rows:
        r.predicted = LABEL_NAMES[predict(model, r.features.as_tuple())]
    return rows


def cmd_predict(args) -> int:
    rows = _predict_rows(load_model(args.model), read_csv(args.features))
    write_csv(rows, args.out, with_predicted=True)
    print(f"wrote {len(rows)} predictions to {args.out}")
    return EXIT_OK


def _report(model, rows, step):
    labelled = [r for r in _predict_rows(model, rows) if r.label != "unknown"]
    if not labelled:
        raise ConfigError("no labelled rows to evaluate")
    return scenario_report([r.predicted for r in labelled], [r.label for r in labelled], step)


def _write_json(data, path) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def cmd_eval(args) -> int:
    report = _report(load_model(args.model), read_csv(args.features), args.step)
    print(report.table())
    if args.report:
        _write_json(report.as_dict(), args.report)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train_entries, test_entries = split(load_manifest(args.manifest), cfg.split_seed,
                                        cfg.train_fraction)
    save_manifest(train_entries, out / "train.json")
    save_manifest(test_entries, out / "test.json")

    train_rows, f1 = extract_all(train_entries, cfg)
    test_rows, f2 = extract_all(test_entries, cfg)
    write_csv(train_rows, out / "features_train.csv")
    write_csv(test_rows, out / "features_test.csv")

    model, code = _train(train_rows, cfg)
    save_model(model, out / "model.json")

    resub = _report(model, train_rows, len(train_rows))
    report = _report(model, test_rows, args.step)
    _write_json(resub.as_dict(), out / "train_report.json")
    _write_json(report.as_dict(), out / "report.json")

    print(f"training resubstitution accuracy: {percent_str(resub.pooled)}%")
    print(report.table())
    if f1 or f2:
        return _failure_code(f1 + f2)
    return code


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="ovoscope", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic candling dataset")
    p.add_argument("--fertile", type=int, default=50)
    p.add_argument("--infertile", type=int, default=50)
    p.add_argument("--out", required=True)
    p.add_argument("--hard", action="store_true", help="overlapping classes")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", parents=[common], help="write enhanced gray crops")
    p.add_argument("images", nargs="*")
    p.add_argument("--manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("extract", parents=[common], help="feature CSV from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("split", parents=[common], help="stratified train/test manifests")
    p.add_argument("--manifest", required=True)
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", parents=[common], help="train the SVM on a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="append a predicted column")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", parents=[common], help="scenario accuracy report")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--step", type=int, default=10)
    p.add_argument("--report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", parents=[common], help="split, extract, train and evaluate")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--step", type=int, default=10)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "preprocess" and not (args.images or args.manifest):
        parser.error("preprocess needs image paths or --manifest")
    try:
        return args.func(args)
    except (OSError, NetpbmError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (OvoscopeError, ValueError, KeyError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
