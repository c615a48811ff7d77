import numpy as np
import pytest
from scipy.special import expit

from textlogit.errors import DegenerateLabelsError, ParameterError
from textlogit.model_selection import (
    CvGrid,
    cv_error,
    export_cv_csv,
    grid_search,
    kfold_split,
    one_se_lambda,
)
from textlogit.penalty import ScadParams
from textlogit.solver import FitOptions, fit, lambda_path


def _instance(seed=0, n=120, p=6, k=2, scale=0.9):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[:k] = [scale, -scale][: min(k, 2)] * (1 if k <= 2 else 1)
    for j in range(2, k):
        beta[j] = scale
    y = rng.binomial(1, expit(X @ beta)).astype(np.float64)
    return X, y


class TestKfold:
    def test_even_folds(self):
        folds = kfold_split(10, 5, seed=0)
        sizes = np.bincount(folds, minlength=5)
        assert sizes.tolist() == [2, 2, 2, 2, 2]

    def test_uneven_folds(self):
        folds = kfold_split(7, 3, seed=0)
        sizes = sorted(np.bincount(folds, minlength=3).tolist())
        assert sizes == [2, 2, 3]

    def test_deterministic(self):
        a = kfold_split(40, 6, seed=9)
        b = kfold_split(40, 6, seed=9)
        assert np.array_equal(a, b)
        c = kfold_split(40, 6, seed=10)
        assert not np.array_equal(a, c)

    def test_stratification_exact_imbalance(self):
        # 90 positives / 10 negatives in 10 folds: one negative per fold
        labels = np.array([1] * 90 + [0] * 10)
        folds = kfold_split(100, 10, seed=4, labels=labels)
        for f in range(10):
            assert (labels[folds == f] == 0).sum() == 1

    def test_stratified_fraction_within_one_doc(self):
        rng = np.random.default_rng(0)
        labels = (rng.random(83) < 0.37).astype(int)
        folds = kfold_split(83, 7, seed=1, labels=labels)
        global_frac = labels.mean()
        for f in range(7):
            fold_labels = labels[folds == f]
            assert abs(fold_labels.sum() - global_frac * fold_labels.size) <= 1

    def test_k_validation(self):
        with pytest.raises(ParameterError):
            kfold_split(5, 6, seed=0)
        with pytest.raises(ParameterError):
            kfold_split(5, 1, seed=0)


class TestCvError:
    def test_null_model_near_log2(self):
        # balanced labels, pure-noise features: held-out loss close to ln 2
        X, y = _instance(seed=3, n=80, p=4, k=0)
        err = cv_error(X, y, 4, ScadParams(lam=10.0), seed=0)
        assert err == pytest.approx(np.log(2), abs=0.05)

    def test_perfect_separator_clamped_near_zero(self):
        rng = np.random.default_rng(1)
        X = np.vstack([np.full((20, 1), 3.0), np.full((20, 1), -3.0)])
        X = X + rng.normal(scale=0.01, size=X.shape)
        y = np.array([1] * 20 + [0] * 20, dtype=float)
        err = cv_error(X, y, 4, ScadParams(lam=0.0), seed=0)
        assert err < 1e-3

    def test_leave_one_out_matches_literal_loop(self):
        X, y = _instance(seed=5, n=6, p=2, k=1)
        params = ScadParams(lam=0.0)
        options = FitOptions()

        def fit_one(X_train, y_train):
            model = fit(X_train, y_train, params, options)
            return model.intercept, model.dense_coefficients()

        folds = kfold_split(6, 6, seed=0, labels=y)
        # literal loop in the package's fold order
        order = np.argsort(folds, kind="stable")
        want = 0.0
        for i in range(6):
            mask = folds != folds[i]
            b0, beta = fit_one(X[mask], y[mask])
            eta = b0 + X[i] @ beta
            pi = min(max(1 / (1 + np.exp(-eta)), 1e-12), 1 - 1e-12)
            want += -(y[i] * np.log(pi) + (1 - y[i]) * np.log(1 - pi))
        want /= 6
        got = cv_error(X, y, 6, params, options, seed=0)
        assert got == pytest.approx(want, abs=1e-10)

    def test_all_folds_skipped_raises(self):
        X = np.random.default_rng(0).standard_normal((6, 2))
        y = np.ones(6)
        with pytest.raises(DegenerateLabelsError):
            cv_error(X, y, 3, ScadParams(lam=0.5), seed=0)

    def test_lone_negative_folds_partially_skipped(self):
        X = np.random.default_rng(0).standard_normal((8, 2))
        y = np.array([1, 1, 1, 1, 1, 1, 1, 0], dtype=float)
        # the fold holding the lone negative trains fine; the rest are
        # skipped only if their training split lost the negative
        err = cv_error(X, y, 4, ScadParams(lam=0.5), seed=0)
        assert np.isfinite(err)

    def test_misclassification_loss(self):
        X, y = _instance(seed=6, n=60, p=3, k=1, scale=3.0)
        err = cv_error(X, y, 5, ScadParams(lam=0.01), seed=0, loss="misclassification")
        assert 0.0 <= err <= 0.5


class TestGridSearch:
    def test_singleton_grid(self):
        X, y = _instance(seed=7)
        grid = CvGrid(k_values=(4,), gamma_values=(3.7,), n_lambdas=2, lambda_ratio=0.5)
        report = grid_search(X, y, grid, seed=0)
        assert len(report.entries) == 2
        assert report.best in report.entries

    def test_report_completeness_and_mean_identity(self):
        X, y = _instance(seed=8)
        grid = CvGrid(k_values=(3, 4), gamma_values=(2.5, 3.7), n_lambdas=4,
                      lambda_ratio=0.1)
        report = grid_search(X, y, grid, seed=1)
        assert len(report.entries) == 2 * 2 * 4
        for e in report.entries:
            sizes = np.array(e.fold_sizes, dtype=float)
            means = np.array(e.fold_errors)
            assert e.mean_error == pytest.approx(
                float((means * sizes).sum() / sizes.sum()), abs=1e-12
            )

    def test_determinism(self):
        X, y = _instance(seed=9)
        grid = CvGrid(k_values=(3,), gamma_values=(3.0,), n_lambdas=3, lambda_ratio=0.2)
        a = grid_search(X, y, grid, seed=5)
        b = grid_search(X, y, grid, seed=5)
        assert [(e.k, e.gamma, e.lam, e.mean_error) for e in a.entries] == [
            (e.k, e.gamma, e.lam, e.mean_error) for e in b.entries
        ]
        assert (a.best.k, a.best.gamma, a.best.lam) == (b.best.k, b.best.gamma, b.best.lam)

    def test_best_matches_exhaustive_cv_error_loop(self):
        # one clearly optimal lambda on a strong-signal instance
        X, y = _instance(seed=10, n=150, p=5, k=2, scale=1.5)
        grid = CvGrid(k_values=(5,), gamma_values=(3.7,), n_lambdas=6, lambda_ratio=0.02)
        report = grid_search(X, y, grid, seed=2)
        lams = lambda_path(X, y, 6, 0.02)
        errors = [
            cv_error(X, y, 5, ScadParams(lam=float(l), gamma=3.7), seed=2)
            for l in lams
        ]
        assert report.best.lam == pytest.approx(float(lams[int(np.argmin(errors))]))

    def test_tie_breaks_prefer_larger_lambda(self):
        from textlogit.model_selection import CvEntry, _better

        a = CvEntry(k=5, gamma=3.0, lam=0.5, mean_error=0.4, fold_errors=[], fold_sizes=[])
        b = CvEntry(k=5, gamma=3.0, lam=0.3, mean_error=0.4, fold_errors=[], fold_sizes=[])
        c = CvEntry(k=5, gamma=2.5, lam=0.5, mean_error=0.4, fold_errors=[], fold_sizes=[])
        d = CvEntry(k=4, gamma=2.5, lam=0.5, mean_error=0.4, fold_errors=[], fold_sizes=[])
        assert _better(a, b)
        assert _better(c, a)
        assert _better(d, c)

    def test_empty_grid_rejected(self):
        with pytest.raises(ParameterError):
            CvGrid(k_values=())

    def test_one_se_lambda_at_least_best(self):
        X, y = _instance(seed=11, n=150, p=5, k=2, scale=1.5)
        grid = CvGrid(k_values=(5,), gamma_values=(3.7,), n_lambdas=8, lambda_ratio=0.05)
        report = grid_search(X, y, grid, seed=0)
        assert one_se_lambda(report) >= report.best.lam

    def test_csv_export(self, tmp_path):
        X, y = _instance(seed=12)
        grid = CvGrid(k_values=(3,), gamma_values=(3.0,), n_lambdas=2, lambda_ratio=0.5)
        report = grid_search(X, y, grid, seed=0)
        path = tmp_path / "cv.csv"
        export_cv_csv(report, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "K,gamma,lambda,mean_error,fold_errors,is_best"
        assert len(lines) == 3
        assert sum(line.endswith(",1") for line in lines[1:]) == 1
