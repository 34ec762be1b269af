"""Command-line surface: gen, train, eval, compare, rules and stream.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import statistics
import sys
import time

import numpy as np

from . import baselines, config as cfgmod, evaluation, topsis
from .classifiers import (CostMatrix, ForestModel, TreeModel, apply_cost_reweighting,
                          extract_rules, load_model, predict_forest_batch,
                          predict_knn_batch, predict_nb_batch, predict_tree_batch,
                          render_rule, save_model, train_c45, train_knn,
                          train_naive_bayes, train_random_forest)
from .classifiers.bayes import NaiveBayesModel
from .classifiers.knn import KnnModel
from .exceptions import ConfigError, DataError
from .features import (DATASET_CSV_HEADER, DEFAULT_INDICATOR_CAP, build_feature_vector,
                       dataset_from_episodes, read_dataset_csv, write_dataset_csv)
from .trajdata import (Dataset, EPISODE_CSV_HEADER, TrajectorySample,
                       generate_synthetic_dataset, parse_episode_csv, write_episode_csv)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="rearwarn",
                description="Rear-end collision warning toolkit")
    p.add_argument("--config", help="key=value config file "
                   f"(default from ${cfgmod.CONFIG_ENV_VAR})")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic episode corpus")
    g.add_argument("--out", required=True, help="episode CSV path")
    g.add_argument("--dataset-out", help="also write the labeled feature CSV here")
    g.add_argument("--episodes", type=int, help="episode count override")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--force", action="store_true", help="allow overwriting outputs")

    t = sub.add_parser("train", help="train a classifier and serialize it")
    t.add_argument("--data", required=True, help="episode or labeled dataset CSV")
    t.add_argument("--out", required=True, help="model file path")
    t.add_argument("--method", default="rf", help="rf | c45 | knn[:k] | nb")
    t.add_argument("--cost", default="1:1", help="cost matrix FN:FP")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--units", choices=("si", "kmh"), default="si")
    t.add_argument("--feature", choices=("ttc", "tg"),
                   help="train on a single indicator feature (threshold extraction)")
    t.add_argument("--depth", type=int, help="depth cap for c45")
    t.add_argument("--force", action="store_true")

    e = sub.add_parser("eval", help="evaluate a trained model on labeled data")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--units", choices=("si", "kmh"), default="si")

    c = sub.add_parser("compare", help="compare classifiers and baselines, rank with TOPSIS")
    c.add_argument("--data", required=True, help="episode or labeled dataset CSV")
    c.add_argument("--out", required=True, help="comparison CSV path")
    c.add_argument("--ranking-out", help="TOPSIS ranking CSV path")
    c.add_argument("--methods", help="comma list; default: classifiers + all baselines")
    c.add_argument("--scenario", dest="scenarios",
                   help="comma list of training fractions (default 0.65,0.7,0.8)")
    c.add_argument("--seeds", default="0", help="comma list of split seeds")
    c.add_argument("--cost", default="5:1")
    c.add_argument("--units", choices=("si", "kmh"), default="si")
    c.add_argument("--repeats", type=int, default=1, help="timing repeats (median reported)")
    c.add_argument("--no-timing", action="store_true",
                   help="skip wall-clock timing: deterministic output, "
                        "TOPSIS restricted to the no-time assumption")
    c.add_argument("--force", action="store_true")

    r = sub.add_parser("rules", help="print decision rules of a tree or forest model")
    r.add_argument("--model", required=True)
    r.add_argument("--top", type=int, default=10, help="rules to show, by support")

    s = sub.add_parser("stream", help="read t,v_f,v_l,range lines, emit verdicts")
    s.add_argument("--model", required=True)
    s.add_argument("--units", choices=("si", "kmh"), default="si")
    return p


def _refuse_overwrite(path: str, force: bool) -> None:
    if os.path.exists(path) and not force:
        raise ConfigError(f"refusing to overwrite {path!r} (use --force)")


def _load_any_dataset(path: str, units: str, cap: float):
    """Accept either CSV flavor, sniffing the first non-comment line."""
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path!r}: {exc}") from None
    with fh:
        first = ""
        for line in fh:
            if line.strip() and not line.lstrip().startswith("#"):
                first = line.strip()
                break
        fh.seek(0)
        if first == EPISODE_CSV_HEADER:
            episodes = parse_episode_csv(fh, units=units)
            return dataset_from_episodes(episodes, cap=cap, provenance="ingested")
        if first == DATASET_CSV_HEADER:
            return read_dataset_csv(fh)
    raise DataError(f"{path}: unrecognized CSV header {first!r}")


def cmd_gen(args, cfg) -> int:
    gen_cfg = cfgmod.generator_config(cfg)
    if args.episodes is not None:
        gen_cfg = dataclasses.replace(gen_cfg, n_episodes=args.episodes)
    _refuse_overwrite(args.out, args.force)
    episodes = generate_synthetic_dataset(gen_cfg, args.seed)
    snapshot = cfgmod.config_snapshot(cfg, {"seed": args.seed,
                                            "gen.n_episodes": gen_cfg.n_episodes})
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        write_episode_csv(episodes, fh, comments=snapshot)
    print(f"wrote {len(episodes)} episodes to {args.out}")
    if args.dataset_out:
        _refuse_overwrite(args.dataset_out, args.force)
        cap = float(cfg.get("features.cap", DEFAULT_INDICATOR_CAP))
        ds = dataset_from_episodes(episodes, cap=cap, seed=args.seed)
        with open(args.dataset_out, "w", encoding="utf-8", newline="\n") as fh:
            write_dataset_csv(ds, fh, comments=snapshot)
        safe, warn = ds.class_counts()
        print(f"wrote {len(ds)} labeled instances to {args.dataset_out} "
              f"(safe={safe}, warning={warn})")
    return EXIT_OK


def cmd_train(args, cfg) -> int:
    _refuse_overwrite(args.out, args.force)
    cost = CostMatrix.parse(args.cost)
    cap = float(cfg.get("features.cap", DEFAULT_INDICATOR_CAP))
    ds = _load_any_dataset(args.data, args.units, cap)

    if args.feature:
        col = evaluation.INDICATOR_COLUMNS[args.feature]
        X1 = np.zeros_like(ds.X)
        X1[:, 0] = ds.X[:, col]
        ds = Dataset(X1, ds.y, ds.w, provenance=ds.provenance, seed=ds.seed)

    weighted = apply_cost_reweighting(ds, cost)
    name, _, arg = args.method.partition(":")
    t0 = time.perf_counter()
    if name == "rf":
        model = train_random_forest(weighted, seed=args.seed, **cfgmod.forest_params(cfg))
    elif name == "c45":
        model = train_c45(weighted, max_depth=args.depth, **cfgmod.c45_params(cfg))
    elif name == "knn":
        k = int(arg) if arg else int(cfg.get("knn.k", 1))
        model = train_knn(weighted, k)
    elif name == "nb":
        model = train_naive_bayes(weighted)
    else:
        raise ConfigError(f"unknown method {args.method!r}")
    elapsed = time.perf_counter() - t0

    snapshot = cfgmod.config_snapshot(cfg, {
        "seed": args.seed, "method": args.method, "cost": args.cost,
        "feature": args.feature, "depth": args.depth})
    save_model(model, args.out, comments=snapshot)
    safe, warn = ds.class_counts()
    print(f"trained {args.method} on {len(ds)} instances "
          f"(safe={safe}, warning={warn}, cost={args.cost}) in {elapsed:.2f}s")
    print(f"model written to {args.out}")
    if args.feature and isinstance(model, TreeModel) and not model.is_leaf(0):
        print(f"critical {args.feature} threshold: {model.root_threshold:g} s")
    return EXIT_OK


def _batch_predictor(model):
    if isinstance(model, ForestModel):
        return predict_forest_batch
    if isinstance(model, TreeModel):
        return predict_tree_batch
    if isinstance(model, KnnModel):
        return predict_knn_batch
    if isinstance(model, NaiveBayesModel):
        return predict_nb_batch
    raise DataError(f"cannot predict with {type(model).__name__}")


def cmd_eval(args, cfg) -> int:
    cap = float(cfg.get("features.cap", DEFAULT_INDICATOR_CAP))
    ds = _load_any_dataset(args.data, args.units, cap)
    model = load_model(args.model)
    preds = _batch_predictor(model)(model, ds.X)
    cm = evaluation.confusion(preds, ds.y)
    m = evaluation.metrics(cm)
    print(f"instances: {len(ds)}")
    print(f"confusion: tp={cm.tp} fn={cm.fn} fp={cm.fp} tn={cm.tn}")
    for label, v in (("accuracy", m.accuracy), ("sensitivity", m.sensitivity),
                     ("specificity", m.specificity)):
        print(f"{label}: {v:.4f}" if v is not None else f"{label}: undefined")
    return EXIT_OK


DEFAULT_COMPARE_METHODS = ("rf", "c45", "knn:2", "nb") + baselines.BASELINE_NAMES


def cmd_compare(args, cfg) -> int:
    _refuse_overwrite(args.out, args.force)
    if args.ranking_out:
        _refuse_overwrite(args.ranking_out, args.force)
    cap = float(cfg.get("features.cap", DEFAULT_INDICATOR_CAP))
    ds = _load_any_dataset(args.data, args.units, cap)
    cost = CostMatrix.parse(args.cost)
    scenarios = [float(s) for s in
                 (args.scenarios or cfg.get("scenarios", "0.65,0.7,0.8")).split(",")]
    seeds = [int(s) for s in (args.seeds or cfg.get("seeds", "0")).split(",")]
    method_names = (args.methods.split(",") if args.methods
                    else list(DEFAULT_COMPARE_METHODS))
    fp = cfgmod.forest_params(cfg)
    bp = {name: baselines.get_preset(name, **fields)
          for name, fields in cfgmod.baseline_overrides(cfg).items()}
    methods = [evaluation.resolve_method(m.strip(), fp, bp) for m in method_names]

    reports = evaluation.run_comparison(ds, scenarios, methods, seeds, cost,
                                        repeats=args.repeats,
                                        with_timing=not args.no_timing)
    snapshot = cfgmod.config_snapshot(cfg, {
        "scenarios": ",".join(repr(s) for s in scenarios),
        "seeds": ",".join(str(s) for s in seeds),
        "methods": ",".join(m.name for m in methods),
        "cost": args.cost})
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        evaluation.write_comparison_csv(reports, fh, comments=snapshot)
    print(f"wrote {len(reports)} evaluation rows to {args.out}")

    timed = not args.no_timing
    assumptions = (1, 2, 3, 4) if timed else (2,)
    col_w = max(10, *(len(m.name) for m in methods)) + 2
    header = "assumption".ljust(12) + "".join(
        f"scenario={s:g}".ljust(col_w) for s in scenarios)
    print()
    print("TOPSIS selection (best method per scenario)")
    print(header)
    for a in assumptions:
        cells = []
        for s in scenarios:
            rows = [r for r in reports if r.scenario == s]
            cells.append(topsis.select_best(rows, a, include_time=timed).ljust(col_w))
        print(str(a).ljust(12) + "".join(cells))

    if args.ranking_out:
        rows = [r for r in reports if r.scenario == scenarios[-1]]
        ranking = topsis.topsis_rank(
            topsis.matrix_from_reports(rows, include_time=timed),
            topsis.assumption_weights(assumptions[0], include_time=timed))
        with open(args.ranking_out, "w", encoding="utf-8", newline="\n") as fh:
            topsis.write_ranking_csv(ranking, fh, comments=snapshot)
        print(f"\nwrote TOPSIS ranking (assumption {assumptions[0]}, "
              f"scenario {scenarios[-1]:g}) to {args.ranking_out}")
    return EXIT_OK


def cmd_rules(args, cfg) -> int:
    model = load_model(args.model)
    if isinstance(model, TreeModel):
        trees = [model]
    elif isinstance(model, ForestModel):
        trees = model.trees
    else:
        raise DataError("rules require a tree or forest model")
    if args.top < 0:
        raise ConfigError("--top must be >= 0")
    all_rules = []
    for tree in trees:
        all_rules.extend(extract_rules(tree))
    all_rules.sort(key=lambda r: -r.support_weight)
    shown = all_rules[:args.top]
    print(f"# {len(all_rules)} rules from {len(trees)} tree(s); showing top {len(shown)}")
    for rule in shown:
        print(render_rule(rule))
    return EXIT_OK


def cmd_stream(args, cfg) -> int:
    cap = float(cfg.get("features.cap", DEFAULT_INDICATOR_CAP))
    model = load_model(args.model)
    predict = _batch_predictor(model)
    speed_scale = 1.0 / 3.6 if args.units == "kmh" else 1.0

    # warm-up so the first verdict does not pay dispatch costs
    predict(model, np.zeros((1, 5)))

    latencies = []
    malformed = 0
    out = sys.stdout
    for lineno, line in enumerate(sys.stdin, start=1):
        line = line.strip()
        if not line:
            continue
        t0 = time.perf_counter_ns()
        parts = line.split(",")
        try:
            if len(parts) != 4:
                raise ValueError(f"expected 4 fields, got {len(parts)}")
            t_raw = parts[0].strip()
            v_f = float(parts[1]) * speed_scale
            v_l = float(parts[2]) * speed_scale
            rng = float(parts[3])
            sample = TrajectorySample(float(t_raw), v_f, v_l, rng)
            if rng < 0 or v_f < 0 or v_l < 0:
                raise ValueError("negative speed or range")
            row = np.array([build_feature_vector(sample).as_row(cap)])
            label = int(predict(model, row)[0])
        except (ValueError, DataError) as exc:
            malformed += 1
            print(f"line {lineno}: {exc}", file=sys.stderr)
            continue
        latency_us = (time.perf_counter_ns() - t0) / 1000.0
        latencies.append(latency_us)
        out.write(f"{t_raw},{label},{latency_us:.1f}\n")
        out.flush()
    if latencies:
        print(f"stream done: {len(latencies)} verdicts, {malformed} malformed, "
              f"median latency {statistics.median(latencies):.1f} us", file=sys.stderr)
    else:
        print(f"stream done: 0 verdicts, {malformed} malformed", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "compare": cmd_compare,
    "rules": cmd_rules,
    "stream": cmd_stream,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = cfgmod.load_config_file(args.config)
        return _COMMANDS[args.command](args, cfg)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BrokenPipeError:
        return EXIT_OK
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
