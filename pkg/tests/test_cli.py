import csv
import json
from pathlib import Path

import pytest

from abfix.cli import SUMMARY_KEYS, main, run
from abfix.problem import ProblemFileError, parse_problem, parse_problem_file

PROBLEMS = sorted((Path(__file__).parent.parent / "problems").glob("*.json"))


def quarter_map(**overrides):
    block = {"map": "x/4", "x0": 1,
             "space": {"name": "abs", "domain": {"kind": "interval", "lower": 0, "upper": 1},
                       "alpha": 2, "beta": 1},
             "kind": "weak-alpha-beta", "constants": {"xi1": 0.25, "xi2": 0}, "tol": 1e-12}
    block.update(overrides)
    return {"version": "1.0", "task": "solve-map", "seed": 0, "solve-map": block}


def fredholm(**overrides):
    block = {"kernel": "fredholm-quarter", "m": 0, "n": 8, "M": 16, "lipschitz": 0.25}
    block.update(overrides)
    return {"version": "1.0", "task": "solve-fredholm", "solve-fredholm": block}


def write(tmp_path, data, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def summary(out_dir):
    return json.loads((Path(out_dir) / "summary.json").read_text())


class TestParse:
    def test_round_trip(self):
        prob = parse_problem(quarter_map())
        assert parse_problem(prob.to_dict()) == prob

    @pytest.mark.parametrize("path", PROBLEMS, ids=lambda p: p.stem)
    def test_shipped_problems_parse(self, path):
        parse_problem_file(path)

    def test_inadmissible_constants_named(self):
        data = quarter_map(kind="kannan", constants={"lambda": 0.6})
        with pytest.raises(ProblemFileError, match=r"λ must lie in \[0, 0.5\)"):
            parse_problem(data)

    def test_two_blocks(self):
        data = quarter_map()
        data["solve-ode"] = {"rhs": "ode-decay", "s0": 0, "r0": 1, "h": 0.5}
        with pytest.raises(ProblemFileError, match="exactly one task block"):
            parse_problem(data)

    def test_block_must_match_task(self):
        data = quarter_map()
        data["task"] = "classify"
        with pytest.raises(ProblemFileError, match="block is 'solve-map'"):
            parse_problem(data)

    @pytest.mark.parametrize("field,value", [("tol", 0), ("max_iter", 0), ("map", "sin"),
                                             ("kind", "edelstein"), ("bogus", 1)])
    def test_field_constraints(self, field, value):
        with pytest.raises(ProblemFileError, match=field if field != "map" else "unknown map"):
            parse_problem(quarter_map(**{field: value}))

    def test_bad_params(self):
        data = quarter_map()
        data["solve-map"]["space"]["alpha"] = 0.5
        with pytest.raises(ProblemFileError, match="alpha"):
            parse_problem(data)

    def test_simpson_needs_even_M(self):
        with pytest.raises(ProblemFileError, match="even"):
            parse_problem(fredholm(quadrature="simpson", M=15))

    def test_malformed_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "task": "classify",\n  "seed": 0,,\n}')
        with pytest.raises(ProblemFileError, match=r"bad.json:3:\d+: malformed JSON"):
            parse_problem_file(path)


class TestRun:
    def test_solve_map_outputs(self, tmp_path):
        assert main(["run", str(write(tmp_path, quarter_map())), "--out-dir", str(tmp_path)]) == 0
        out = summary(tmp_path)
        assert tuple(sorted(out)) == tuple(sorted(SUMMARY_KEYS))
        assert out["status"] == "ok" and out["termination"] == "converged"
        assert out["K"] == 0.25 and out["bound_available"]
        assert out["final_residual"] <= 1e-12 and out["n_iter"] <= 25
        with open(tmp_path / "trace.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iteration", "residual", "a_priori_bound"]
        assert [(int(r[0]), float(r[1])) for r in rows[1:3]] == [(0, 0.75), (1, 0.1875)]

    def test_verify_reports_witness(self, tmp_path):
        path = next(p for p in PROBLEMS if p.stem == "verify_abs_squared")
        assert main(["run", str(path), "--out-dir", str(tmp_path)]) == 0
        (v,) = summary(tmp_path)["result"]["witness_violations"]
        assert v["witness"] == [0.0, 2.0, 1.0] and (v["lhs"], v["rhs"]) == (4.0, 2.0)

    def test_classify(self, tmp_path):
        path = next(p for p in PROBLEMS if p.stem == "classify_abs_squared")
        assert main(["run", str(path), "--out-dir", str(tmp_path)]) == 0
        res = summary(tmp_path)["result"]
        assert res["label"] == "b-metric" and res["symmetric_constant"] == 2.0

    def test_estimate_infeasible_is_not_an_error(self, tmp_path):
        data = {"task": "estimate-contraction", "estimate-contraction": {
            "map": "identity", "kind": "banach", "n_pairs": 100,
            "space": {"name": "abs", "domain": {"kind": "interval", "lower": 0, "upper": 1}}}}
        assert run(parse_problem(data), tmp_path) == 0
        assert summary(tmp_path)["result"]["feasible"] is False

    def test_invalid_file_exit_2(self, tmp_path, capsys):
        path = write(tmp_path, quarter_map(kind="kannan", constants={"lambda": 0.6}))
        assert main(["run", str(path), "--out-dir", str(tmp_path)]) == 2
        assert "λ must lie in [0, 0.5)" in capsys.readouterr().err
        assert main(["run", str(tmp_path / "missing.json")]) == 2

    def test_strict_precondition_exit_3(self, tmp_path):
        path = write(tmp_path, fredholm())
        assert main(["run", str(path), "--out-dir", str(tmp_path), "--strict"]) == 3
        out = summary(tmp_path)
        assert out["status"] == "diverged" and out["result"]["factor"] == 2.0

    def test_best_effort_divergence_exit_3(self, tmp_path):
        assert run(parse_problem(fredholm(x0=1.0)), tmp_path) == 3
        assert "grew" in summary(tmp_path)["error"]

    def test_best_effort_converges_with_warning(self, tmp_path):
        assert run(parse_problem(fredholm()), tmp_path) == 0
        out = summary(tmp_path)
        assert out["n_iter"] == 0 and "not below 1" in out["warnings"][0]

    def test_closure_failure_exit_4(self, tmp_path):
        data = quarter_map(map="cos")
        data["solve-map"]["space"]["domain"] = {"kind": "interval", "lower": 2, "upper": 3}
        data["solve-map"]["x0"] = 2.5
        assert run(parse_problem(data), tmp_path) == 4
        assert summary(tmp_path)["status"] == "evaluation-error"

    def test_solution_csv(self, tmp_path):
        path = next(p for p in PROBLEMS if p.stem == "fredholm_linear")
        assert main(["run", str(path), "--out-dir", str(tmp_path)]) == 0
        with open(tmp_path / "solution.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["node", "value"] and len(rows) == 1002
        assert max(abs(float(v) - 1.2 * float(s)) for s, v in rows[1:]) <= 1e-4

    def test_seed_override(self, tmp_path):
        path = next(p for p in PROBLEMS if p.stem == "verify_abs_squared")
        assert main(["run", str(path), "--out-dir", str(tmp_path), "--seed", "7"]) == 0
        assert summary(tmp_path)["seed"] == 7
        assert main(["run", str(path), "--seed", "-1"]) == 2

    def test_schema(self, capsys):
        assert main(["schema"]) == 0
        schema = json.loads(capsys.readouterr().out)
        assert "solve-fredholm" in schema["properties"]


class TestDeterminism:
    @pytest.mark.parametrize("path", PROBLEMS, ids=lambda p: p.stem)
    def test_byte_identical(self, path, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", str(path), "--out-dir", str(a)]) == 0
        assert main(["run", str(path), "--out-dir", str(b)]) == 0
        assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()
