"""Command-line front end.

Subcommands: preprocess, train, cv, predict, evaluate, baseline, simulate,
report. Every command takes --seed / --config / --out-dir, writes its
outputs plus a manifest.json into the output directory, and exits 1 on
usage errors, 2 on data errors, 3 on numerical errors.

The config file is flat "key = value" text; recognized keys are the
preprocessing options (stopwords, stemmer, min_token_length) and solver
options (tolerance, max_outer_iters, max_inner_sweeps, adaptive_rescaling,
standardize, fit_intercept).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .artifacts import (
    RunManifest,
    read_dtm,
    read_json,
    sha256_text,
    write_dtm,
    write_json,
)
from .baselines import (
    KnnConfig,
    knn_predict_matrix,
    nb_fit,
    nb_predict_matrix,
    select_knn_k,
    svm_fit,
    svm_predict_matrix,
    truncated_lr_fit,
)
from .corpus import (
    FREQUENCY,
    TFIDF,
    PreprocessConfig,
    build_dtm,
    ingest_csv,
    labels_vector,
    vectorize,
)
from .errors import (
    NumericalError,
    ParameterError,
    TextlogitError,
)
from .metrics import compute_metrics, confusion, format_metrics_table, metrics_to_json
from .model_selection import CvGrid, export_cv_csv, grid_search
from .penalty import ScadParams
from .simulate import (
    SimDesign,
    consistency_experiment,
    global_optimum_probe,
    oracle_experiment,
    sparsity_experiment,
)
from .solver import (
    FitOptions,
    fit,
    load_model,
    model_to_dict,
    predict_proba_matrix,
    selected_features,
    vocabulary_hash,
)
from .stopwords import load_stopword_file

log = logging.getLogger("textlogit")

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


def _read_config(path) -> dict:
    values: dict[str, str] = {}
    if path is None:
        return values
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParameterError(f"config line {line!r} is not key = value")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _as_bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"expected a boolean, got {text!r}")


def _preprocess_config(cfg: dict) -> PreprocessConfig:
    kwargs = {}
    if "stopwords" in cfg:
        kwargs["stopword_list"] = load_stopword_file(cfg["stopwords"])
    if "stemmer" in cfg:
        kwargs["stemmer"] = cfg["stemmer"]
    if "min_token_length" in cfg:
        kwargs["min_token_length"] = int(cfg["min_token_length"])
    return PreprocessConfig(**kwargs)


def _fit_options(cfg: dict) -> FitOptions:
    kwargs = {}
    if "tolerance" in cfg:
        kwargs["tolerance"] = float(cfg["tolerance"])
    if "max_outer_iters" in cfg:
        kwargs["max_outer_iters"] = int(cfg["max_outer_iters"])
    if "max_inner_sweeps" in cfg:
        kwargs["max_inner_sweeps"] = int(cfg["max_inner_sweeps"])
    if "adaptive_rescaling" in cfg:
        kwargs["adaptive_rescaling"] = _as_bool(cfg["adaptive_rescaling"])
    if "standardize" in cfg:
        kwargs["standardize"] = _as_bool(cfg["standardize"])
    if "fit_intercept" in cfg:
        kwargs["fit_intercept"] = _as_bool(cfg["fit_intercept"])
    return FitOptions(**kwargs)


def _manifest(args, cfg: dict) -> RunManifest:
    config_text = "\n".join(f"{k} = {v}" for k, v in sorted(cfg.items()))
    return RunManifest.start(
        command=sys.argv[1:] or [args.command],
        seed=args.seed,
        config_hash=sha256_text(config_text),
        version=__version__,
    )


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_matrix(args, vocab_attr="vocab", dtm_attr="dtm"):
    vocabulary = read_json(getattr(args, vocab_attr))
    dtm = read_dtm(getattr(args, dtm_attr), vocabulary)
    return dtm, vocabulary


def _labels(path) -> np.ndarray:
    return np.asarray(read_json(path), dtype=np.int64)


# ---------------------------------------------------------------------------
# commands

def cmd_preprocess(args) -> int:
    cfg = _read_config(args.config)
    manifest = _manifest(args, cfg)
    manifest.add_input(args.csv)
    config = _preprocess_config(cfg)
    out = _out_dir(args)

    docs = ingest_csv(args.csv, args.text_column, args.rating_column)
    unlabeled = sum(1 for d in docs if d.label is None)
    log.info("read %d rows; excluded %d rating-3 rows", len(docs), unlabeled)

    if args.vocab:
        vocabulary = read_json(args.vocab)
        idf = np.asarray(read_json(args.idf)) if args.idf else None
        dtm = vectorize(docs, vocabulary, config, args.weighting, idf)
    else:
        dtm = build_dtm(docs, config, args.weighting)

    labels = labels_vector(docs)
    write_dtm(dtm, out / "matrix.dtm")
    write_json(dtm.vocabulary, out / "vocabulary.json")
    write_json([int(x) for x in labels], out / "labels.json")
    write_json([str(i) for i in dtm.doc_ids], out / "doc_ids.json")
    outputs = ["matrix.dtm", "vocabulary.json", "labels.json", "doc_ids.json"]
    if dtm.idf is not None:
        write_json([float(x) for x in dtm.idf], out / "idf.json")
        outputs.append("idf.json")
    manifest.finish(outputs, out / "manifest.json")
    print(f"wrote {dtm.n_docs} x {dtm.n_terms} {dtm.weighting} matrix to {out}")
    return 0


def cmd_train(args) -> int:
    cfg = _read_config(args.config)
    manifest = _manifest(args, cfg)
    for p in (args.dtm, args.vocab, args.labels):
        manifest.add_input(p)
    out = _out_dir(args)
    dtm, _ = _load_matrix(args)
    labels = _labels(args.labels)
    options = _fit_options(cfg)
    model = fit(dtm, labels, ScadParams(lam=args.lam, gamma=args.gamma), options)
    write_json(model_to_dict(model), out / "model.json")
    manifest.finish(["model.json"], out / "manifest.json")
    print(
        f"fit lam={args.lam:g} gamma={args.gamma:g}: "
        f"{model.n_selected} features selected, converged={model.converged}"
    )
    return 0


def cmd_cv(args) -> int:
    cfg = _read_config(args.config)
    manifest = _manifest(args, cfg)
    for p in (args.dtm, args.vocab, args.labels):
        manifest.add_input(p)
    out = _out_dir(args)
    dtm, _ = _load_matrix(args)
    labels = _labels(args.labels)
    grid = CvGrid(
        k_values=tuple(int(k) for k in args.k_values.split(",")),
        gamma_values=tuple(float(g) for g in args.gamma_values.split(",")),
        n_lambdas=args.n_lambdas,
        lambda_ratio=args.lambda_ratio,
    )
    report = grid_search(dtm, labels, grid, _fit_options(cfg), seed=args.seed, loss=args.loss)
    export_cv_csv(report, out / "cvreport.csv")
    best = report.best
    write_json(
        {"K": best.k, "gamma": best.gamma, "lambda": best.lam, "error": best.mean_error},
        out / "best.json",
    )
    manifest.finish(["cvreport.csv", "best.json"], out / "manifest.json")
    print(f"best: K={best.k} gamma={best.gamma} lambda={best.lam:.6g} error={best.mean_error:.6g}")
    return 0


def cmd_predict(args) -> int:
    cfg = _read_config(args.config)
    manifest = _manifest(args, cfg)
    for p in (args.model, args.dtm, args.vocab):
        manifest.add_input(p)
    out = _out_dir(args)
    dtm, vocabulary = _load_matrix(args)
    model = load_model(args.model, vocabulary)
    probs = predict_proba_matrix(model, dtm)
    with open(out / "predictions.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "probability", "label"])
        for i, p in enumerate(probs):
            writer.writerow([i, f"{p:.10g}", int(p >= args.cutoff)])
    manifest.finish(["predictions.csv"], out / "manifest.json")
    print(f"wrote {len(probs)} predictions")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _read_config(args.config)
    manifest = _manifest(args, cfg)
    out = _out_dir(args)
    if args.predictions:
        manifest.add_input(args.predictions)
        with open(args.predictions, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        predictions = np.array([int(r["label"]) for r in rows])
    else:
        if not (args.model and args.dtm and args.vocab):
            raise ParameterError("evaluate needs --predictions or --model/--dtm/--vocab")
        for p in (args.model, args.dtm, args.vocab):
            manifest.add_input(p)
        dtm, vocabulary = _load_matrix(args)
        model = load_model(args.model, vocabulary)
        predictions = (predict_proba_matrix(model, dtm) >= args.cutoff).astype(int)
    manifest.add_input(args.labels)
    truths = _labels(args.labels)
    report = compute_metrics(confusion(predictions, truths))
    (out / "metrics.json").write_text(metrics_to_json(report) + "\n", encoding="utf-8")
    table = format_metrics_table(report)
    (out / "metrics.txt").write_text(table + "\n", encoding="utf-8")
    manifest.finish(["metrics.json", "metrics.txt"], out / "manifest.json")
    print(table)
    return 0


def cmd_baseline(args) -> int:
    cfg = _read_config(args.config)
    manifest = _manifest(args, cfg)
    for p in (args.dtm, args.vocab, args.labels):
        manifest.add_input(p)
    out = _out_dir(args)
    dtm, vocabulary = _load_matrix(args)
    labels = _labels(args.labels)
    if args.test_dtm:
        test_dtm = read_dtm(args.test_dtm, vocabulary)
        test_labels = _labels(args.test_labels)
    else:
        test_dtm, test_labels = dtm, labels

    envelope = {"vocabulary_hash": vocabulary_hash(vocabulary)}
    features_used = dtm.n_terms
    features_selected = dtm.n_terms
    if args.kind == "nb":
        model = nb_fit(dtm, labels, smoothing=args.smoothing)
        predictions = nb_predict_matrix(model, test_dtm)
        envelope.update(
            model_type="naive_bayes",
            smoothing=model.smoothing,
            class_log_priors=[float(x) for x in model.class_log_priors],
            term_log_likelihoods=[
                [t, float(neg), float(pos)]
                for t, neg, pos in zip(
                    vocabulary, model.term_log_likelihoods[0], model.term_log_likelihoods[1]
                )
            ],
        )
    elif args.kind == "knn":
        k = args.k or select_knn_k(dtm, labels, seed=args.seed)
        config = KnnConfig(k=k)
        predictions = knn_predict_matrix(dtm, labels, test_dtm.matrix, config)
        envelope.update(model_type="knn", k=k, row_normalization=config.row_normalization)
    elif args.kind == "svm":
        model = svm_fit(dtm, labels, cost=args.cost, epochs=args.epochs, seed=args.seed)
        predictions = svm_predict_matrix(model, test_dtm)
        envelope.update(
            model_type="linear_svm",
            intercept=model.bias,
            cost=model.cost,
            coefficients=[
                [vocabulary[j], float(w)]
                for j, w in enumerate(model.weights)
                if w != 0.0
            ],
        )
    elif args.kind == "lr":
        model = truncated_lr_fit(dtm, labels, args.threshold)
        kept_vocab = model.vocabulary
        index = {t: j for j, t in enumerate(vocabulary)}
        kept = [index[t] for t in kept_vocab]
        test_matrix = test_dtm.matrix[:, kept]
        eta = test_matrix @ model.dense_coefficients() + model.intercept
        predictions = (eta >= 0).astype(int)
        envelope = model_to_dict(model)
        envelope["model_type"] = "truncated_logistic"
        envelope["sparsity_threshold"] = args.threshold
        features_used = features_selected = len(kept_vocab)
    else:  # pragma: no cover - argparse restricts choices
        raise ParameterError(f"unknown baseline {args.kind!r}")

    report = compute_metrics(confusion(predictions, test_labels))
    write_json(envelope, out / "model.json")
    (out / "metrics.json").write_text(
        metrics_to_json(report, features_used, features_selected) + "\n",
        encoding="utf-8",
    )
    table = format_metrics_table(report, features_used, features_selected)
    (out / "metrics.txt").write_text(table + "\n", encoding="utf-8")
    manifest.finish(["model.json", "metrics.json", "metrics.txt"], out / "manifest.json")
    print(table)
    return 0


def cmd_simulate(args) -> int:
    cfg = _read_config(args.config)
    manifest = _manifest(args, cfg)
    out = _out_dir(args)
    summary: dict
    rep_rows: list[dict]

    if args.experiment == "consistency":
        ns = [int(n) for n in args.n_values.split(",")]
        designs = [
            SimDesign(n=n, p=args.p, k=args.k, beta_magnitude=args.beta_magnitude,
                      n_reps=args.reps, seed=args.seed)
            for n in ns
        ]
        report = consistency_experiment(designs, gamma=args.gamma, tune=args.tune)
        summary = {
            "ns": report.ns,
            "median_errors": report.median_errors,
            "scaled_errors": report.scaled_errors,
            "nonconvergence_rates": report.nonconvergence_rates,
            "monotone_decreasing": report.monotone_decreasing,
            "band_factor": report.band_factor,
            "valid": report.valid,
        }
        rep_rows = [
            {"n": n, "rep": i, "error": e}
            for n, errs in zip(report.ns, report.per_rep_errors)
            for i, e in enumerate(errs)
        ]
    elif args.experiment == "sparsity":
        design = SimDesign(n=args.n, p=args.p, k=args.k,
                           beta_magnitude=args.beta_magnitude,
                           n_reps=args.reps, seed=args.seed)
        report = sparsity_experiment(design, gamma=args.gamma, tune=args.tune)
        summary = {
            "zero_recovery_rate": report.zero_recovery_rate,
            "support_recovery_rate": report.support_recovery_rate,
            "nonconvergence_rate": report.nonconvergence_rate,
            "valid": report.valid,
        }
        rep_rows = [
            {"rep": i, "zero_recovered": int(z)}
            for i, z in enumerate(report.per_rep_zero_recovered)
        ]
    elif args.experiment == "oracle":
        design = SimDesign(n=args.n, p=args.p, k=args.k,
                           beta_magnitude=args.beta_magnitude,
                           n_reps=args.reps, seed=args.seed)
        report = oracle_experiment(design, gamma=args.gamma, tune=args.tune)
        summary = {
            "n_dropped": report.n_dropped,
            "median_oracle_gap": float(np.median(report.oracle_gaps)),
            "ks": {
                name: {"statistic": s, "p_value": p, "passes_at_0.01": ok}
                for name, (s, p, ok) in report.ks_results.items()
            },
        }
        names = list(report.statistic_samples)
        rep_rows = [
            {"rep": i, "oracle_gap": g,
             **{name: report.statistic_samples[name][i] for name in names}}
            for i, g in enumerate(report.oracle_gaps)
        ]
    elif args.experiment == "global":
        design = SimDesign(n=args.n, p=args.p, k=args.k,
                           beta_magnitude=args.beta_magnitude,
                           n_reps=1, seed=args.seed)
        options = FitOptions(adaptive_rescaling=False, fit_intercept=False)
        report = global_optimum_probe(
            design, args.restarts, ScadParams(lam=args.lam, gamma=args.gamma),
            options, init_scale=args.init_scale, column_scale=args.column_scale,
        )
        summary = {
            "spread": report.spread,
            "min_curvature": report.min_curvature,
            "convex_regime": report.min_curvature > 1.0 / (args.gamma - 1.0),
        }
        rep_rows = [
            {"restart": i, "objective": o} for i, o in enumerate(report.objectives)
        ]
    else:  # pragma: no cover
        raise ParameterError(f"unknown experiment {args.experiment!r}")

    write_json(summary, out / "summary.json")
    if rep_rows:
        with open(out / "reps.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rep_rows[0]))
            writer.writeheader()
            writer.writerows(rep_rows)
    manifest.finish(["summary.json", "reps.csv"], out / "manifest.json")
    print(f"{args.experiment}: {summary}")
    return 0


def cmd_report(args) -> int:
    cfg = _read_config(args.config)
    manifest = _manifest(args, cfg)
    for p in (args.model, args.dtm, args.vocab):
        manifest.add_input(p)
    out = _out_dir(args)
    dtm, vocabulary = _load_matrix(args)
    model = load_model(args.model, vocabulary)
    mean_weight = np.asarray(dtm.matrix.mean(axis=0)).ravel()
    selected = dict(selected_features(model))
    with open(out / "report.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["term", "coefficient", "doc_frequency", "mean_tfidf", "selected"])
        for j, term in enumerate(vocabulary):
            coef = model.coefficients.get(j, 0.0)
            writer.writerow(
                [term, f"{coef:.10g}", int(dtm.doc_freq[j]),
                 f"{mean_weight[j]:.10g}", int(term in selected)]
            )
    manifest.finish(["report.csv"], out / "manifest.json")
    print(f"wrote report for {len(vocabulary)} terms; {len(selected)} selected")
    return 0


# ---------------------------------------------------------------------------
# argument wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="textlogit",
        description="Sparse logistic sentiment classification over text features.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", default=None)
        p.add_argument("--out-dir", default=".")

    p = sub.add_parser("preprocess", help="CSV -> matrix artifact + vocabulary")
    common(p)
    p.add_argument("--csv", required=True)
    p.add_argument("--text-column", default="text")
    p.add_argument("--rating-column", default="rating")
    p.add_argument("--weighting", choices=[TFIDF, FREQUENCY], default=TFIDF)
    p.add_argument("--vocab", default=None, help="project onto an existing vocabulary")
    p.add_argument("--idf", default=None, help="idf sidecar for --vocab projection")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="fit the penalized model")
    common(p)
    p.add_argument("--dtm", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--gamma", type=float, default=3.7)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="grid search over (K, gamma, lambda)")
    common(p)
    p.add_argument("--dtm", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--k-values", default="5,10,19")
    p.add_argument("--gamma-values", default="2.5,3.7,4.0")
    p.add_argument("--n-lambdas", type=int, default=30)
    p.add_argument("--lambda-ratio", type=float, default=0.01)
    p.add_argument("--loss", choices=["nll", "misclassification"], default="nll")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("predict", help="score a matrix with a saved model")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--dtm", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--cutoff", type=float, default=0.5)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="confusion metrics for predictions")
    common(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--predictions", default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--dtm", default=None)
    p.add_argument("--vocab", default=None)
    p.add_argument("--cutoff", type=float, default=0.5)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("baseline", help="comparison classifiers")
    common(p)
    p.add_argument("kind", choices=["nb", "knn", "svm", "lr"])
    p.add_argument("--dtm", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--test-dtm", default=None)
    p.add_argument("--test-labels", default=None)
    p.add_argument("--smoothing", type=float, default=1.0)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--cost", type=float, default=1.0)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--threshold", type=float, default=0.99)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("simulate", help="Monte Carlo estimator checks")
    common(p)
    p.add_argument("experiment", choices=["consistency", "sparsity", "oracle", "global"])
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--n-values", default="200,800,3200")
    p.add_argument("--p", type=int, default=50)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--beta-magnitude", type=float, default=2.0)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--gamma", type=float, default=3.7)
    p.add_argument("--tune", choices=["per_rep", "pilot"], default="per_rep")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--lam", type=float, default=0.05)
    p.add_argument("--init-scale", type=float, default=0.1)
    p.add_argument("--column-scale", type=float, default=3.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="per-term feature report for plotting")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--dtm", required=True)
    p.add_argument("--vocab", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        return args.func(args)
    except ParameterError as exc:
        log.error("usage: %s", exc)
        return EXIT_USAGE
    except NumericalError as exc:
        log.error("numerical: %s", exc)
        return EXIT_NUMERICAL
    except TextlogitError as exc:
        log.error("data: %s", exc)
        return EXIT_DATA
    except FileNotFoundError as exc:
        log.error("data: %s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
