"""Command-line entry point.

Usage:
    relation-anomaly run --config relation_anomaly/data/synthetic.cfg --seeds 0,1,2
    relation-anomaly ablate --config experiment.cfg --variant no_ae
    relation-anomaly synonyms --config experiment.cfg --rates 0,0.5,1
    relation-anomaly noise --config experiment.cfg
    relation-anomaly baseline --config experiment.cfg
    relation-anomaly synth-gen --spec relation_anomaly/data/synthetic_dining.json --out dining.json
    relation-anomaly export-graph --config experiment.cfg --image dining_anomalous_000

Exit codes: 0 success, 1 invalid input or config, 2 runtime failure or any failed seed.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Sequence

from ..analyze import (
    ABLATION_VARIANTS,
    ExperimentConfig,
    RunRecord,
    export_scored_graph,
    load_config,
    load_inputs,
    print_report,
    print_sweep,
    run_ablation,
    run_experiment,
    run_noise_sweep,
    run_synonym_sweep,
    write_run_outputs,
    write_sweep_outputs,
)
from ..errors import RelationAnomalyError, ValidationError
from ..graphdata import gen_synthetic, load_synthetic_config, save_dataset
from ..strategies import CountingStrategy

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


def _float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got '{text}'") from e


def _int_list(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got '{text}'") from e


def _build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relation-anomaly",
        description="Anomalous relationship detection in scene graphs with an autoencoder and a normalizing flow.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Experiment config file (key = value lines).")
    common.add_argument("--out", default=None, help="Output directory (overrides output_dir).")
    common.add_argument("--seeds", type=_int_list, default=None, help="Comma separated seeds (overrides seeds).")
    common.add_argument("--verbose", action="store_true", help="Log every training epoch.")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="Flow detector and counting baselines on every seed.")
    ablate = sub.add_parser("ablate", parents=[common], help="Design-study variant of the flow detector.")
    ablate.add_argument("--variant", required=True, choices=ABLATION_VARIANTS)
    synonyms = sub.add_parser("synonyms", parents=[common], help="Synonym substitution sweep.")
    synonyms.add_argument("--rates", type=_float_list, default=None, help="Rates in [0, 1] (default: config).")
    noise = sub.add_parser("noise", parents=[common], help="Gaussian feature noise sweep.")
    noise.add_argument("--sigmas", type=_float_list, default=None, help="Noise levels (default: config).")
    sub.add_parser("baseline", parents=[common], help="Counting baselines only.")
    synth = sub.add_parser("synth-gen", parents=[common], help="Write a synthetic dataset to JSON.")
    synth.add_argument("--spec", default=None, help="Generator spec (default: the config's synthetic_spec).")
    synth.add_argument("--seed", type=int, default=None, help="Generator seed (default: the config's synthetic_seed).")
    export = sub.add_parser("export-graph", parents=[common], help="Write one scored scene graph as DOT.")
    export.add_argument("--image", required=True, help="Image id to export.")
    export.add_argument("--method", default="flow", help="Detector whose scores are drawn (default: flow).")
    return parser


def _load(args: argparse.Namespace) -> ExperimentConfig:
    if not args.config:
        raise ValidationError(f"'{args.command}' needs --config")
    return load_config(args.config, seeds=args.seeds, output_dir=args.out)


def _finish(records: Sequence[RunRecord]) -> int:
    failed = [seed for r in records for seed in r.failures]
    return EXIT_RUNTIME if failed else EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load(args)
    record = run_experiment(config)
    write_run_outputs(record, config.output_dir)
    print_report(record)
    return _finish([record])


def _cmd_baseline(args: argparse.Namespace) -> int:
    config = _load(args)
    strategies = {"counting": CountingStrategy(), "soft_counting": CountingStrategy(soft=True)}
    record = run_experiment(config, strategies, label="baseline")
    write_run_outputs(record, config.output_dir)
    print_report(record, title="COUNTING BASELINE REPORT")
    return _finish([record])


def _cmd_ablate(args: argparse.Namespace) -> int:
    config = _load(args)
    records = run_ablation(config, args.variant)
    if args.variant == "latent_sweep":
        write_sweep_outputs(records, config.output_dir, "latent")
        print_sweep(records, "LATENT DIMENSION SWEEP (x = d_z)")
    else:
        write_run_outputs(records[0], config.output_dir)
        print_report(records[0], title=f"ABLATION {args.variant.upper()}")
    return _finish(records)


def _cmd_synonyms(args: argparse.Namespace) -> int:
    config = _load(args)
    records = run_synonym_sweep(config, args.rates)
    write_sweep_outputs(records, config.output_dir, "synonym")
    print_sweep(records, "SYNONYM RATE SWEEP (x = rate)")
    return _finish(records)


def _cmd_noise(args: argparse.Namespace) -> int:
    config = _load(args)
    records = run_noise_sweep(config, args.sigmas)
    write_sweep_outputs(records, config.output_dir, "noise")
    print_sweep(records, "FEATURE NOISE SWEEP (x = sigma)")
    return _finish(records)


def _cmd_synth_gen(args: argparse.Namespace) -> int:
    spec, seed = args.spec, args.seed
    out = args.out
    if args.config:
        config = load_config(args.config)
        spec = spec or config.synthetic_spec
        seed = config.synthetic_seed if seed is None else seed
        out = out or config.output_dir
    if not spec:
        raise ValidationError("synth-gen needs --spec or a config with synthetic_spec")
    dataset = gen_synthetic(load_synthetic_config(spec), seed or 0)
    path = out or "."
    if not path.endswith(".json"):
        path = os.path.join(path, f"{dataset.scene}.json")
    save_dataset(path, dataset)
    print(f"Wrote {len(dataset.graphs)} images ({len(dataset.anomalous_graphs)} anomalous) to {path}")
    return EXIT_OK


def _cmd_export_graph(args: argparse.Namespace) -> int:
    config = _load(args)
    seed = config.seeds[0]
    inputs = load_inputs(config)
    single = config.model_copy(update={"seeds": [seed]})
    record = run_experiment(single, inputs=inputs, keep_scores=True)
    if record.failures:
        return EXIT_RUNTIME

    for (scene, run_seed), dataset in record.prepared.items():
        if run_seed != seed:
            continue
        try:
            graph = dataset.graph(args.image)
        except KeyError:
            continue
        scores = record.scores.get((args.method, scene, seed))
        if scores is None:
            raise ValidationError(f"no scores for detector '{args.method}', expected one of {record.methods}")
        if not any(iid in scores for iid in graph.instance_ids()):
            raise ValidationError(f"image '{args.image}' was not scored for seed {seed} (training split or outside every subgroup)")
        path = os.path.join(config.output_dir, f"{args.image}_{args.method}.dot")
        export_scored_graph(graph, scores, path)
        print(f"Wrote {path}")
        return EXIT_OK
    raise ValidationError(f"image '{args.image}' not found in any dataset")


COMMANDS = {
    "run": _cmd_run,
    "ablate": _cmd_ablate,
    "synonyms": _cmd_synonyms,
    "noise": _cmd_noise,
    "baseline": _cmd_baseline,
    "synth-gen": _cmd_synth_gen,
    "export-graph": _cmd_export_graph,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_arg_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except ValidationError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except RelationAnomalyError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
