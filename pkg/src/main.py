"""
Command-line entry point.

    gen-corpus      synthetic corpus (+ optional synthetic vectors)
    lr-range        LR range test
    train           train one model from scratch
    transfer-train  pre-train on one corpus, fine-tune on another
    eval            EER of a saved model on a corpus partition
    ablate          feature ablation rows (c,p,t / -c / -p / -t [/ NoTL])
    compare         architectures side by side plus the acoustic stand-in
    ssl             self-teaching loop
    predict         one score per utterance

Options resolve as Settings defaults < --config file < flags. A manifest
``<out>.manifest`` with the resolved options and input hashes is written
beside every output; passing it back as --config repeats the run.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from src.config import build_config, load_config_file, merge_options, parse_bool, settings
from src.corpus import (
    ConfidenceAcousticScorer, Corpus, GeneratorSpec, Partition, generate, load_corpus,
    partition, read_utterances, save_corpus, write_synthetic_vectors, write_utterances,
)
from src.corpus.generator import DESK_SCALE, GeneratorMode
from src.embeddings import EmbeddingStore, build_batch, assemble_all, load_vectors
from src.evaluation import (
    ExperimentConfig, compare_models, compute_eer, run_ablation, score_utterances,
)
from src.exceptions import ConfigError, DirectednessError, IntegrityError
from src.models import Architecture, Classifier, ModelSpec, build_model, load_model, save_model
from src.self_teaching import SslConfig, ssl_run
from src.training import Decay, Phase, TrainConfig, lr_range_test, train, transfer_train
from src.utils.history import HISTORY_LOGGER, configure_history
from src.utils.manifest import read_manifest, verify_inputs, write_manifest
from src.utils.records import format_table, write_records, write_roc, write_scores

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
logger = logging.getLogger(__name__)

_logging_ready = False


def setup_logging(level: Optional[str] = None):
    """Console logging plus the rotating run-history file"""
    global _logging_ready
    if _logging_ready:
        return
    logging.basicConfig(level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO), format=LOG_FORMAT)

    log_dir = settings.log_dir
    log_dir.mkdir(parents=True, exist_ok=True)
    history_logger = logging.getLogger(HISTORY_LOGGER)
    history_logger.setLevel(logging.DEBUG)
    history_logger.propagate = False

    # File handler with rotation (10MB max, keep 5 backups)
    file_handler = RotatingFileHandler(
        log_dir / settings.HISTORY_LOG_FILE,
        maxBytes=10 * 1024 * 1024,
        backupCount=5,
        encoding='utf-8',
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT))

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))

    history_logger.addHandler(file_handler)
    history_logger.addHandler(console_handler)
    configure_history()
    _logging_ready = True
    logger.debug(f"Run history logging configured: {log_dir / settings.HISTORY_LOG_FILE}")


# === Options ===

@dataclass(frozen=True)
class Option:
    name: str
    type: Callable[[str], Any] = str
    default: Any = None
    help: str = ""
    choices: Optional[Sequence[str]] = None
    required: bool = False
    flag: bool = False

    @property
    def dest(self) -> str:
        return self.name.replace("-", "_")


def _fractions(value: str) -> List[float]:
    return [float(x) for x in value.split(",") if x.strip()]


ARCHS = [a.value for a in Architecture]


def _data_options(vectors: bool = True) -> List[Option]:
    opts = [Option("corpus", required=True, help="corpus TSV (partition sidecar beside it)")]
    if vectors:
        opts += [
            Option("vectors", required=True, help="text word-vector file (fastText .vec format)"),
            Option("vector-limit", int, settings.VECTOR_LIMIT, "cap on vocabulary size (0 = none)"),
        ]
    return opts


def _model_options(default_arch: str = Architecture.LSTM_ATTN.value, default_features: str = "c,p,t") -> List[Option]:
    return [
        Option("model", str, default_arch, "architecture", choices=ARCHS),
        Option("features", str, default_features, "feature groups, e.g. c,p,t or -p"),
        Option("hidden-size", int, settings.HIDDEN_SIZE),
        Option("layers", int, settings.LSTM_LAYERS, "stacked LSTM layers"),
    ]


def _train_options(prefix: str = "") -> List[Option]:
    return [
        Option(f"{prefix}lr-max", float, settings.LR_MAX),
        Option(f"{prefix}lr-min", float, settings.LR_MIN),
        Option(f"{prefix}decay", str, Decay.LINEAR.value, choices=[d.value for d in Decay]),
        Option(f"{prefix}epochs", int, settings.EPOCHS),
        Option(f"{prefix}batch-size", int, settings.BATCH_SIZE),
        Option(f"{prefix}clip-norm", float, settings.CLIP_NORM, "global gradient norm clip (0 = off)"),
    ]


SEED = Option("seed", int, settings.DEFAULT_SEED, "single source of randomness")

COMMANDS: Dict[str, List[Option]] = {
    "gen-corpus": [
        Option("out", required=True, help="corpus TSV to write"),
        SEED,
        Option("mode", str, GeneratorMode.FOLLOW_UP.value, choices=[m.value for m in GeneratorMode]),
        Option("train-size", int, DESK_SCALE[Partition.TRAIN]),
        Option("dev-size", int, DESK_SCALE[Partition.DEV]),
        Option("test-size", int, DESK_SCALE[Partition.TEST]),
        Option("unlabeled-size", int, DESK_SCALE[Partition.UNLABELED]),
        Option("ratio", float, 5.0, "DD:NDD ratio"),
        Option("ambiguous-fraction", float, None),
        Option("unstructured-fraction", float, None),
        Option("contextual-fraction", float, None),
        Option("contextual-ndd-fraction", float, None),
        Option("fractions", _fractions, None, "re-split labeled items, e.g. 0.8333,0.0833,0.0833"),
        Option("repartition", parse_bool, False, "re-split labeled items by PARTITION_FRACTIONS unless --fractions is given",
               flag=True),
        Option("vectors-out", help="also write synthetic vectors covering the grammar"),
        Option("dim", int, settings.EMBEDDING_DIM, "synthetic vector width"),
        Option("oov-rate", float, 0.1, "fraction of slot words left out of the vectors"),
    ],
    "lr-range": _data_options() + _model_options() + [
        Option("out", required=True, help="curve records (JSONL)"),
        SEED,
        Option("lr-lo", float, 1e-4),
        Option("lr-hi", float, 10.0),
        Option("steps", int, 100),
        Option("batch-size", int, settings.BATCH_SIZE),
    ],
    "train": _data_options() + _model_options() + _train_options() + [
        Option("out", required=True, help="model file to write"),
        Option("report", help="per-epoch records (JSONL)"),
        SEED,
    ],
    "transfer-train": _data_options() + _model_options() + _train_options() + _train_options("pre-") + [
        Option("pretrain-corpus", required=True),
        Option("out", required=True, help="model file to write"),
        Option("report", help="per-epoch records of both phases (JSONL)"),
        SEED,
    ],
    "eval": _data_options() + [
        Option("model", required=True, help="model file"),
        Option("partition", str, Partition.TEST.value, choices=[p.value for p in Partition if p is not Partition.UNLABELED]),
        Option("out", required=True, help="report record (JSONL)"),
        Option("roc-out", help="(far, frr, threshold) triples"),
        SEED,
    ],
    "ablate": _data_options() + [o for o in _model_options() if o.name != "features"] + _train_options()
    + _train_options("pre-") + [
        Option("pretrain-corpus", help="transfer-train every row and add a NoTL row"),
        Option("workers", int, settings.ABLATION_WORKERS),
        Option("out", required=True, help="table records (JSONL)"),
        SEED,
    ],
    "compare": _data_options() + [o for o in _model_options() if o.name not in ("model", "features")]
    + _train_options() + _train_options("pre-") + [
        Option("pretrain-corpus"),
        Option("workers", int, settings.ABLATION_WORKERS),
        Option("out", required=True, help="table records (JSONL)"),
        SEED,
    ],
    "ssl": _data_options() + _model_options(Architecture.LSTM.value, "c,t") + _train_options() + [
        Option("dd-quantile", float, settings.SSL_DD_QUANTILE),
        Option("ndd-quantile", float, settings.SSL_NDD_QUANTILE),
        Option("max-passes", int, settings.SSL_MAX_PASSES),
        Option("patience", int, settings.SSL_PATIENCE),
        Option("fusion-weight", float, 0.3),
        Option("fusion-gamma", float, 3.0),
        Option("warm-start", parse_bool, False, flag=True),
        Option("out", required=True, help="per-pass records (JSONL)"),
        Option("model-out", help="write the selected pass's model"),
        Option("dump-pools", help="directory for per-pass labeled-pool snapshots"),
        SEED,
    ],
    "predict": [
        Option("model", required=True, help="model file"),
        Option("vectors", required=True),
        Option("vector-limit", int, settings.VECTOR_LIMIT),
        Option("input", required=True, help="utterance TSV"),
        Option("out", required=True, help="one score per line"),
        Option("attention-out", help="per-utterance attention weights (JSONL)"),
        SEED,
    ],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddsd", description="Device-directed speech classifier experiments")
    parser.add_argument("--log-level", default=None, help="override LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, options in COMMANDS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", help="flat key=value file (a run manifest works)")
        for opt in options:
            if opt.flag:
                p.add_argument(f"--{opt.name}", dest=opt.dest, action="store_const", const=True, default=None, help=opt.help)
            else:
                p.add_argument(f"--{opt.name}", dest=opt.dest, type=opt.type, default=None,
                               choices=opt.choices, help=opt.help)
    return parser


def resolve_options(parser: argparse.ArgumentParser, args: argparse.Namespace) -> Dict[str, Any]:
    options = COMMANDS[args.command]
    defaults = {o.dest: o.default for o in options}
    converters = {o.dest: o.type for o in options}
    file_values = load_config_file(args.config) if args.config else {}
    cli_values = {o.dest: getattr(args, o.dest) for o in options}
    opts = merge_options(defaults, file_values, cli_values, converters)
    for o in options:
        if o.choices and opts[o.dest] is not None and opts[o.dest] not in o.choices:
            raise ConfigError(f"{o.name} must be one of {', '.join(o.choices)}")
        if o.required and opts[o.dest] in (None, ""):
            parser.error(f"the following arguments are required: --{o.name}")
    return opts


# === Helpers ===

def _check_outputs(opts: Dict[str, Any], inputs: Dict[str, str], outputs: Sequence[str]):
    for key in outputs:
        out = opts.get(key)
        if not out:
            continue
        for name, path in inputs.items():
            if Path(out).resolve() == Path(path).resolve():
                raise ConfigError(f"--{key.replace('_', '-')} would overwrite input {name} ({path})")
    for name, path in inputs.items():
        if not Path(path).exists():
            raise ConfigError(f"Input {name} not found: {path}")


def _store(opts) -> EmbeddingStore:
    return load_vectors(opts["vectors"], limit=opts.get("vector_limit") or None, seed=opts["seed"])


def _model_spec(opts, store: EmbeddingStore, arch: Optional[str] = None, features: Optional[str] = None) -> ModelSpec:
    return build_config(
        ModelSpec,
        arch=arch or opts["model"],
        dim=store.dim,
        hidden_size=opts["hidden_size"],
        num_layers=opts["layers"],
        seed=opts["seed"],
        features=features or opts.get("features") or "c,p,t",
    )


def _train_config(opts, prefix: str = "", phase: Phase = Phase.SCRATCH) -> TrainConfig:
    clip = opts[f"{prefix}clip_norm"]
    return build_config(
        TrainConfig,
        lr_max=opts[f"{prefix}lr_max"],
        lr_min=opts[f"{prefix}lr_min"],
        decay=opts[f"{prefix}decay"],
        epochs=opts[f"{prefix}epochs"],
        batch_size=opts[f"{prefix}batch_size"],
        clip_norm=clip if clip else None,
        seed=opts["seed"],
        phase=phase,
    )


def _splits(corpus: Corpus, *parts: Partition):
    out = []
    for p in parts:
        items = corpus.get(p)
        if not items:
            raise IntegrityError(f"Corpus has no {p.value} partition")
        out.append(items)
    return out


INPUTS: Dict[str, Sequence[str]] = {
    "gen-corpus": (),
    "lr-range": ("corpus", "vectors"),
    "train": ("corpus", "vectors"),
    "transfer-train": ("corpus", "pretrain_corpus", "vectors"),
    "eval": ("corpus", "vectors", "model"),
    "ablate": ("corpus", "pretrain_corpus", "vectors"),
    "compare": ("corpus", "pretrain_corpus", "vectors"),
    "ssl": ("corpus", "vectors"),
    "predict": ("input", "vectors", "model"),
}


def _inputs(command: str, opts: Dict[str, Any]) -> Dict[str, str]:
    return {name: opts[name] for name in INPUTS[command] if opts.get(name)}


def _verify_replay(command: str, config: str, opts: Dict[str, Any]):
    """Inputs a manifest replay still points at must hash as they did when it was written"""
    manifest = read_manifest(config)
    replayed = {
        name: path for name, path in _inputs(command, opts).items()
        if manifest.get(name) == str(path) and Path(path).is_file()
    }
    verify_inputs(manifest, replayed)


def _manifest(command: str, opts: Dict[str, Any], inputs: Dict[str, str], *outputs: Optional[str]):
    for out in outputs:
        if out:
            write_manifest(out, command, opts, inputs)


# === Commands ===

def cmd_gen_corpus(opts) -> int:
    overrides = {
        k: opts[k] for k in ("ambiguous_fraction", "unstructured_fraction", "contextual_fraction", "contextual_ndd_fraction")
        if opts[k] is not None
    }
    sizes = {
        Partition.TRAIN: opts["train_size"],
        Partition.DEV: opts["dev_size"],
        Partition.TEST: opts["test_size"],
        Partition.UNLABELED: opts["unlabeled_size"],
    }
    common = dict(n_per_partition=sizes, dd_ndd_ratio=opts["ratio"], seed=opts["seed"], **overrides)
    if opts["mode"] == GeneratorMode.PRETRAIN.value:
        spec = build_config(GeneratorSpec, **{**GeneratorSpec.pretrain().model_dump(), **common})
    else:
        spec = build_config(GeneratorSpec, **common)

    corpus = generate(spec)
    if opts["fractions"] or opts["repartition"]:
        corpus = partition(corpus, opts["fractions"] or settings.partition_fractions, opts["seed"])
    save_corpus(corpus, opts["out"])
    _manifest("gen-corpus", opts, {}, opts["out"])
    if opts["vectors_out"]:
        write_synthetic_vectors(opts["vectors_out"], opts["dim"], opts["seed"], opts["oov_rate"])
        _manifest("gen-corpus", opts, {}, opts["vectors_out"])
    counts = corpus.class_counts()
    print(f"Wrote {len(corpus)} utterances ({counts}) to {opts['out']}")
    return 0


def cmd_lr_range(opts) -> int:
    inputs = _inputs("lr-range", opts)
    _check_outputs(opts, inputs, ["out"])
    corpus, store = load_corpus(opts["corpus"]), _store(opts)
    spec = _model_spec(opts, store)
    (train_set,) = _splits(corpus, Partition.TRAIN)
    result = lr_range_test(
        lambda: build_model(spec, store), train_set, store,
        lr_lo=opts["lr_lo"], lr_hi=opts["lr_hi"], steps=opts["steps"],
        batch_size=opts["batch_size"], seed=opts["seed"],
    )
    write_records(result.records(), opts["out"])
    _manifest("lr-range", opts, inputs, opts["out"])
    print(f"lr_max={result.lr_max:.6g}\nlr_min={result.lr_min:.6g}")
    return 0


def cmd_train(opts) -> int:
    inputs = _inputs("train", opts)
    _check_outputs(opts, inputs, ["out", "report"])
    corpus, store = load_corpus(opts["corpus"]), _store(opts)
    spec, cfg = _model_spec(opts, store), _train_config(opts)
    train_set, dev = _splits(corpus, Partition.TRAIN, Partition.DEV)
    model = build_model(spec, store)
    report = train(model, train_set, dev, store, cfg)
    save_model(model, opts["out"])
    if opts["report"]:
        write_records(report.records(), opts["report"])
    _manifest("train", opts, inputs, opts["out"], opts["report"])
    best = report.best
    if best is not None:
        print(f"best epoch {best.epoch}: dev_loss={best.dev_loss:.4f} dev_eer={best.dev_eer:.1f}")
    return 0


def cmd_transfer_train(opts) -> int:
    inputs = _inputs("transfer-train", opts)
    _check_outputs(opts, inputs, ["out", "report"])
    corpus, pre_corpus, store = load_corpus(opts["corpus"]), load_corpus(opts["pretrain_corpus"]), _store(opts)
    spec = _model_spec(opts, store)
    cfg_pre = _train_config(opts, "pre_", Phase.PRETRAIN)
    cfg_ft = _train_config(opts, "", Phase.FINETUNE)
    result = transfer_train(
        lambda: build_model(spec, store),
        tuple(_splits(pre_corpus, Partition.TRAIN, Partition.DEV)),
        tuple(_splits(corpus, Partition.TRAIN, Partition.DEV)),
        store, cfg_pre, cfg_ft,
    )
    save_model(result.model, opts["out"])
    if opts["report"]:
        records = [{"phase": Phase.PRETRAIN.value, **r} for r in result.pretrain_report.records()]
        records += [{"phase": Phase.FINETUNE.value, **r} for r in result.finetune_report.records()]
        write_records(records, opts["report"])
    _manifest("transfer-train", opts, inputs, opts["out"], opts["report"])
    return 0


def cmd_eval(opts) -> int:
    inputs = _inputs("eval", opts)
    _check_outputs(opts, inputs, ["out", "roc_out"])
    model = load_model(opts["model"])
    corpus, store = load_corpus(opts["corpus"]), _store(opts)
    part = Partition(opts["partition"])
    items = corpus.get(part) if corpus.partition_map else corpus.labeled()
    if not items:
        raise IntegrityError(f"Corpus has no labeled items in {part.value}")
    report = compute_eer(score_utterances(model, items, store))
    write_records([{"partition": part.value, **report.to_record()}], opts["out"])
    if opts["roc_out"]:
        write_roc(report.roc, opts["roc_out"])
    _manifest("eval", opts, inputs, opts["out"], opts["roc_out"])
    print(f"{part.value}: EER {report.eer:.1f}% at threshold {report.threshold:.4f} (loss {report.mean_loss:.4f})")
    return 0


def _experiment_config(opts, arch: str) -> ExperimentConfig:
    return build_config(
        ExperimentConfig,
        arch=arch,
        hidden_size=opts["hidden_size"],
        num_layers=opts["layers"],
        seed=opts["seed"],
        train=_train_config(opts),
        pretrain=_train_config(opts, "pre_", Phase.PRETRAIN) if opts.get("pretrain_corpus") else None,
        workers=opts["workers"],
    )


def _print_table(rows):
    records = [r.to_record() for r in rows]
    print(format_table(records, ["row", "features", "eer", "error"]))
    return records


def cmd_ablate(opts) -> int:
    inputs = _inputs("ablate", opts)
    _check_outputs(opts, inputs, ["out"])
    corpus, store = load_corpus(opts["corpus"]), _store(opts)
    pretrain = load_corpus(opts["pretrain_corpus"]) if opts["pretrain_corpus"] else None
    rows = run_ablation(corpus, store, _experiment_config(opts, opts["model"]), pretrain)
    write_records(_print_table(rows), opts["out"])
    _manifest("ablate", opts, inputs, opts["out"])
    return 0


def cmd_compare(opts) -> int:
    inputs = _inputs("compare", opts)
    _check_outputs(opts, inputs, ["out"])
    corpus, store = load_corpus(opts["corpus"]), _store(opts)
    pretrain = load_corpus(opts["pretrain_corpus"]) if opts["pretrain_corpus"] else None
    cfg = _experiment_config(opts, Architecture.LSTM_ATTN.value)
    rows = compare_models(corpus, store, cfg, ConfidenceAcousticScorer(), pretrain)
    write_records(_print_table(rows), opts["out"])
    _manifest("compare", opts, inputs, opts["out"])
    return 0


def cmd_ssl(opts) -> int:
    inputs = _inputs("ssl", opts)
    _check_outputs(opts, inputs, ["out", "model_out"])
    corpus, store = load_corpus(opts["corpus"]), _store(opts)
    spec, train_cfg = _model_spec(opts, store), _train_config(opts)
    ssl_cfg = build_config(
        SslConfig,
        dd_quantile=opts["dd_quantile"],
        ndd_quantile=opts["ndd_quantile"],
        max_passes=opts["max_passes"],
        patience=opts["patience"],
        fusion_weight=opts["fusion_weight"],
        fusion_gamma=opts["fusion_gamma"],
        warm_start=bool(opts["warm_start"]),
    )
    labeled, dev, test = _splits(corpus, Partition.TRAIN, Partition.DEV, Partition.TEST)
    unlabeled = corpus.unlabeled()
    if not unlabeled:
        raise IntegrityError("Corpus has no unlabeled partition")

    on_pass = None
    if opts["dump_pools"]:
        dump_dir = Path(opts["dump_pools"])
        dump_dir.mkdir(parents=True, exist_ok=True)

        def on_pass(state, record):
            write_utterances(state.labeled, dump_dir / f"pass_{record.pass_index:02d}.tsv")

    state = ssl_run(
        lambda: build_model(spec, store), labeled, unlabeled, dev, test,
        ConfidenceAcousticScorer(), store, ssl_cfg, train_cfg, on_pass=on_pass,
    )
    write_records(state.records(), opts["out"])
    if opts["model_out"] and state.selected_model is not None:
        save_model(state.selected_model, opts["model_out"])
    _manifest("ssl", opts, inputs, opts["out"], opts["model_out"])
    chosen = state.history[state.selected_pass]
    print(f"selected pass {chosen.pass_index}: dev_loss={chosen.dev_loss:.4f} test_eer={chosen.test_eer:.1f}")
    return 0


def _predict(model: Classifier, items, store: EmbeddingStore, batch_size: int = 256):
    seqs = assemble_all(items, store, model.spec.feature_set)
    scores: List[float] = []
    attention: List[List[float]] = []
    for start in range(0, len(seqs), batch_size):
        batch = build_batch(seqs[start:start + batch_size])
        result = model.forward(batch)
        scores.extend(result.scores.value[:, 0].tolist())
        if result.attention is not None:
            for b in range(batch.size):
                attention.append(result.attention[b, batch.mask[b]].tolist())
    return np.array(scores), attention


def cmd_predict(opts) -> int:
    inputs = _inputs("predict", opts)
    _check_outputs(opts, inputs, ["out", "attention_out"])
    model = load_model(opts["model"])
    items = read_utterances(opts["input"])
    store = _store(opts)
    scores, attention = _predict(model, items, store)
    write_scores(scores, opts["out"])
    if opts["attention_out"]:
        if not attention:
            raise ConfigError(f"{model.spec.arch.value} model has no attention weights")
        write_records(
            [{"id": u.id, "weights": [round(w, 6) for w in weights]} for u, weights in zip(items, attention)],
            opts["attention_out"],
        )
    _manifest("predict", opts, inputs, opts["out"], opts["attention_out"])
    return 0


HANDLERS: Dict[str, Callable[[Dict[str, Any]], int]] = {
    "gen-corpus": cmd_gen_corpus,
    "lr-range": cmd_lr_range,
    "train": cmd_train,
    "transfer-train": cmd_transfer_train,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "compare": cmd_compare,
    "ssl": cmd_ssl,
    "predict": cmd_predict,
}


def dispatch(argv: Sequence[str]) -> int:
    """
    Returns:
        0 on success, 1 on domain errors, 2 on usage errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        setup_logging(args.log_level)
        opts = resolve_options(parser, args)
        if args.config:
            _verify_replay(args.command, args.config, opts)
    except SystemExit as e:
        return int(e.code or 0)
    except DirectednessError as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1

    logger.info(f"Running {args.command}")
    try:
        return HANDLERS[args.command](opts)
    except DirectednessError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1


def main():
    sys.exit(dispatch(sys.argv[1:]))
