"""Project command line: build populations, collect data, train, serve.

    coopmind layouts
    coopmind population --layout coordination_ring --out pop.json
    coopmind collect --layout coordination_ring --population pop.json \
        --target-style egocentric --out runs/ds --horizon 800 --trajectories 5
    coopmind pretrain --layouts coordination_ring --out runs/extractor.ckpt
    coopmind train --dataset runs/ds --extractor runs/extractor.ckpt \
        --freeze-extractor --out runs/tom.ckpt --curves runs/curves.csv
    coopmind serve --port 8000 --model coordination_ring=runs/tom.ckpt
"""

from __future__ import annotations

import argparse
import json

from . import nn
from .agents import (
    PlannerParams,
    default_families,
    load_population,
    make_partner_population,
    planner_policy,
    save_population,
)
from .data import collect_dataset, save as save_dataset, load as load_dataset, split_dataset
from .data.collect import DEFAULT_SETTINGS
from .env import BUILTIN_LAYOUTS, NUM_CHANNELS, load_layout
from .model import ToMConfig, ToMModel, pretrain_extractor, save_model, train, write_curves_csv


def cmd_layouts(args):
    for name in BUILTIN_LAYOUTS:
        layout = load_layout(name)
        print(f"{name}: {layout.width}x{layout.height}, "
              f"pots={len(layout.cells_of('P'))}, starts={layout.start_positions}")
    return 0


def cmd_population(args):
    layout = load_layout(args.layout)
    families = default_families(args.families)
    population = make_partner_population(
        layout, families,
        episodes=args.episodes, horizon=args.horizon, seed=args.seed,
    )
    save_population(args.out, population)
    for checkpoint in population:
        print(f"{checkpoint.checkpoint_id}: reward {checkpoint.measured_selfplay_reward:.1f} "
              f"({checkpoint.skill_fraction:.2f} of best)")
    print(f"wrote {args.out}")
    return 0


def _target_policy(layout, style, epsilon):
    return planner_policy(
        layout, PlannerParams(style=style, epsilon=epsilon), policy_id=f"target_{style}"
    )


def cmd_collect(args):
    layout = load_layout(args.layout)
    population = load_population(args.population, layout)
    target = _target_policy(layout, args.target_style, args.target_epsilon)
    dataset = collect_dataset(
        layout, target, population,
        settings=DEFAULT_SETTINGS,
        trajectories_per_pair=args.trajectories,
        horizon=args.horizon,
        seed=args.seed,
        target_style=args.target_style,
    )
    dataset = split_dataset(dataset, seed=args.seed)
    save_dataset(dataset, args.out)
    counts = dataset.manifest["counts"]
    print(f"{counts['trajectories']} trajectories over {counts['pair_settings']} "
          f"pair-settings, {counts['steps_total']} steps -> {args.out}")
    return 0


def cmd_pretrain(args):
    layouts = [load_layout(name) for name in args.layouts]
    donor = planner_policy(
        layouts[0] if len(layouts) == 1 else layouts[0],
        PlannerParams(style=args.donor_style, epsilon=args.donor_epsilon),
        policy_id=f"donor_{args.donor_style}",
    )
    result = pretrain_extractor(
        donor, layouts,
        episodes_per_layout=args.episodes, horizon=args.horizon,
        epochs=args.epochs, seed=args.seed,
    )
    nn.save_tensors(args.out, result.weights, meta=result.provenance)
    print(f"donor top-1 {result.val_top1:.3f}; wrote {args.out}")
    return 0


def cmd_train(args):
    dataset = load_dataset(args.dataset)
    layout = load_layout(dataset.manifest["layout_id"])
    config = ToMConfig(
        seed=args.seed,
        max_epochs=args.epochs,
        early_stop_patience=args.patience,
        batch_size=args.batch_size,
        lr=args.lr,
        freeze_extractor=args.freeze_extractor,
    )
    model = ToMModel((NUM_CHANNELS, layout.height, layout.width), config)
    if args.extractor:
        weights, provenance = nn.load_tensors(args.extractor)
        model.load_extractor(weights, provenance)
    result = train(
        model, dataset, layout,
        log=lambda p: print(
            f"epoch {p['epoch']:3d}: train {p['train_loss']:.4f} "
            f"val {p['val_loss']:.4f} acc {p['val_acc']:.3f}"
        ),
    )
    save_model(args.out, model)
    if args.curves:
        write_curves_csv(args.curves, result.curves)
    print(f"best epoch {result.best_epoch} (val loss {result.best_val_loss:.4f}) -> {args.out}")
    return 0


def cmd_serve(args):
    import uvicorn

    from .server import ServerConfig, create_app

    model_paths = {}
    for spec in args.model or []:
        key, _, path = spec.partition("=")
        if "/" in key:
            layout_name, style = key.split("/", 1)
            model_paths[(layout_name, style)] = path
        else:
            model_paths[key] = path
    config = ServerConfig(
        admin_token=args.admin_token or "",
        tick_seconds=1.0 / args.fps if args.fps > 0 else 0.0,
        ticks_per_episode=args.ticks,
        include_tutorial=not args.no_tutorial,
        log_dir=args.log_dir,
        model_paths=model_paths,
    )
    app = create_app(config, static_dir=args.static)
    print(f"admin token: {config.admin_token}")
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="coopmind")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("layouts", help="list packaged layouts")
    p.set_defaults(func=cmd_layouts)

    p = sub.add_parser("population", help="build a skill-graded partner population")
    p.add_argument("--layout", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--families", type=int, default=5)
    p.add_argument("--episodes", type=int, default=3)
    p.add_argument("--horizon", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_population)

    p = sub.add_parser("collect", help="collect an offline trajectory dataset")
    p.add_argument("--layout", required=True)
    p.add_argument("--population", required=True)
    p.add_argument("--target-style", default="egocentric",
                   choices=["egocentric", "partner_aware"])
    p.add_argument("--target-epsilon", type=float, default=0.0)
    p.add_argument("--trajectories", type=int, default=5)
    p.add_argument("--horizon", type=int, default=800)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_collect)

    p = sub.add_parser("pretrain", help="behavior-clone a donor policy into extractor weights")
    p.add_argument("--layouts", nargs="+", required=True)
    p.add_argument("--donor-style", default="partner_aware",
                   choices=["egocentric", "partner_aware"])
    p.add_argument("--donor-epsilon", type=float, default=0.1)
    p.add_argument("--episodes", type=int, default=2)
    p.add_argument("--horizon", type=int, default=300)
    p.add_argument("--epochs", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pretrain)

    p = sub.add_parser("train", help="train the forecast model on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--extractor")
    p.add_argument("--freeze-extractor", action="store_true")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--curves")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("serve", help="run the realtime game service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--fps", type=float, default=5.0)
    p.add_argument("--ticks", type=int, default=400)
    p.add_argument("--no-tutorial", action="store_true")
    p.add_argument("--admin-token")
    p.add_argument("--log-dir")
    p.add_argument("--static", help="directory with the browser client bundle")
    p.add_argument("--model", action="append",
                   help="layout=ckpt or layout/style=ckpt (repeatable)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
