import argparse
import json
import sys

import numpy as np

from .data import load_records, records_to_arrays
from .model import SurrogateConfig
from .train import train_from_file


def cmd_train(args):
    overrides = {}
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
    for field in ("epochs", "samples", "seed"):
        value = getattr(args, field)
        if value is not None:
            overrides[field] = value
    cfg = SurrogateConfig(**overrides)
    train_from_file(cfg, args.data, args.out)
    return 0


def cmd_serve(args):
    from .serve import serve
    serve(args.artifact)
    return 0


def cmd_eval(args):
    """Mean squared token error of the artifact on a holdout file."""
    from .infer import Predictor
    predictor = Predictor(args.artifact)
    cur, end, tgt, steps = records_to_arrays(load_records(args.data))
    errs = []
    for c, e, t, j in zip(cur, end, tgt, steps):
        pred = predictor.predict_grid(c, e, int(j), int(j) + 1)
        errs.append(float(np.mean((pred[:, :-1] - t[:, :-1]) ** 2)))
    print(json.dumps({"pairs": len(errs), "mse": float(np.mean(errs))}))
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="zonopredict")
    sub = parser.add_subparsers(dest="command", required=True)
    p_train = sub.add_parser("train")
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--out", required=True)
    p_train.add_argument("--config")
    p_train.add_argument("--epochs", type=int)
    p_train.add_argument("--samples", type=int)
    p_train.add_argument("--seed", type=int)
    p_serve = sub.add_parser("serve")
    p_serve.add_argument("artifact")
    p_eval = sub.add_parser("eval")
    p_eval.add_argument("--artifact", required=True)
    p_eval.add_argument("--data", required=True)
    args = parser.parse_args(argv)
    if args.command == "train":
        return cmd_train(args)
    if args.command == "serve":
        return cmd_serve(args)
    if args.command == "eval":
        return cmd_eval(args)
    raise AssertionError("unhandled command")


if __name__ == "__main__":
    sys.exit(main())
