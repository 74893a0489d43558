import json
import math

import pytest
from jsonschema import Draft202012Validator

from momentkernel import __version__
from momentkernel.cli import SUBCOMMANDS, dumps, load_schema, main
from momentkernel.semialgebraic import SemiAlgebraicSet, X, disk_set

UNIT_BOX = SemiAlgebraicSet((0, 1, 0, 1)).to_json()
SLAB = SemiAlgebraicSet((-1, 1, -1, 1)).to_json()
PAIRS = [[[1.5 * math.cos(a), 1.5 * math.sin(a)], [2.5 * math.cos(a + 0.3), 2.5 * math.sin(a + 0.3)]] for a in (0, 1, 2, 3, 4)]

EXAMPLES = {
    "moments": ({"set": UNIT_BOX, "order": 1}, []),
    "kernel": ({"domain": {"shape": "disk", "radius": 1.0}, "z": [2, 0], "w": [2, 0]}, []),
    "critical-l": ({"set": SLAB, "moments": {"order": 1, "entries": [0, 1, 0]}}, ["--grid", "40"]),
    "krein": ({"set": UNIT_BOX, "moments": {"order": 0, "entries": [0.5]}}, ["--grid", "40"]),
    "reconstruct": ({"set": SLAB, "moments": {"order": 1, "entries": [2, 1, 0]}}, ["--grid", "40", "--emit-grid"]),
    "chebyshev": (
        {"set": UNIT_BOX, "moments": {"order": 0, "entries": [0.5]}, "psi": X.to_json()},
        ["--grid", "40"],
    ),
    "sign-moments": ({"set": SLAB, "p": X.to_json(), "order": 1}, []),
    "positivity": ({"kernel": {"type": "disk"}, "points": PAIRS}, []),
    "factorize": ({"kernel": {"type": "disk"}, "samples": 8, "holdout": PAIRS[:2]}, []),
    "quadrature-identity": ({"triangle": [[0, 0], [1, 0], [0, 1]], "monomial": 3}, []),
}


def run(capsys, tmp_path, name, doc, flags=(), raw=None):
    path = tmp_path / "in.json"
    path.write_text(raw if raw is not None else json.dumps(doc))
    code = main([name, "--input", str(path), *flags])
    out, err = capsys.readouterr()
    return code, out, err


def validate(doc, schema):
    errors = list(Draft202012Validator(load_schema(schema)).iter_errors(doc))
    assert not errors, [e.message for e in errors]


class TestJsonWriter:
    def test_seventeen_digits(self):
        assert dumps(0.1) == "0.10000000000000001"
        assert dumps(2.0) == "2.0"

    def test_non_finite(self):
        assert dumps([math.nan, math.inf, -math.inf]) == '[\n  "nan",\n  "inf",\n  "-inf"\n]'

    def test_round_trip(self):
        obj = {"a": [1, 2.5, None, True], "b": {"c": "d"}, "e": []}
        assert json.loads(dumps(obj)) == obj

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            dumps(object())


class TestSchemas:
    @pytest.mark.parametrize("name", SUBCOMMANDS)
    def test_schemas_are_valid(self, name):
        for kind in ("input", "output"):
            Draft202012Validator.check_schema(load_schema(f"{name}.{kind}"))

    @pytest.mark.parametrize("name", SUBCOMMANDS)
    def test_examples_match_input_schema(self, name):
        validate(EXAMPLES[name][0], f"{name}.input")


class TestSubcommands:
    @pytest.mark.parametrize("name", SUBCOMMANDS)
    def test_output_matches_schema(self, capsys, tmp_path, name):
        doc, flags = EXAMPLES[name]
        code, out, err = run(capsys, tmp_path, name, doc, flags)
        assert code == 0, err
        result = json.loads(out)
        validate(result, f"{name}.output")
        assert result["inputs_echo"]["input"] == doc

    def test_moments_values(self, capsys, tmp_path):
        _, out, _ = run(capsys, tmp_path, "moments", *EXAMPLES["moments"])
        assert json.loads(out)["result"]["entries"] == pytest.approx([1, 0.5, 0.5], abs=1e-14)

    def test_kernel_value(self, capsys, tmp_path):
        _, out, _ = run(capsys, tmp_path, "kernel", *EXAMPLES["kernel"])
        assert json.loads(out)["result"]["value_re"] == pytest.approx(0.75)

    def test_numeric_kernel(self, capsys, tmp_path):
        doc = {"domain": disk_set(1.0).to_json(), "z": [2, 0], "w": [0, 3], "method": "numeric"}
        code, out, _ = run(capsys, tmp_path, "kernel", doc)
        res = json.loads(out)["result"]
        assert code == 0 and res["method"] == "numeric"
        assert complex(res["value_re"], res["value_im"]) == pytest.approx(1 - 1 / (2 * -3j), rel=1e-6)

    def test_critical_l_zero(self, capsys, tmp_path):
        doc = {"set": SLAB, "moments": {"order": 0, "entries": [0.0]}}
        code, out, _ = run(capsys, tmp_path, "critical-l", doc)
        res = json.loads(out)["result"]
        assert code == 0 and res["L0"] == 0 and res["p_star"] is None

    def test_reconstruct_zero_set(self, capsys, tmp_path):
        _, out, _ = run(capsys, tmp_path, "reconstruct", *EXAMPLES["reconstruct"])
        pts = json.loads(out)["result"]["zero_set"]
        assert pts and max(abs(x) for x, _ in pts) < 1e-2

    def test_quadrature_identity_flags(self, capsys):
        code = main(["quadrature-identity", "--triangle", "0,1,i", "--monomial", "2"])
        res = json.loads(capsys.readouterr().out)["result"]
        assert code == 0 and res["abs_diff"] < 1e-12

    def test_factorize_unit_kernel(self, capsys, tmp_path):
        doc = {"kernel": {"type": "unit"}, "samples": 4, "holdout": PAIRS[:1]}
        code, out, _ = run(capsys, tmp_path, "factorize", doc)
        assert code == 0 and json.loads(out)["result"]["dimension"] == 0

    def test_flags_echoed(self, capsys, tmp_path):
        _, out, _ = run(capsys, tmp_path, "moments", EXAMPLES["moments"][0], ["--tol", "1e-6"])
        flags = json.loads(out)["inputs_echo"]["flags"]
        assert flags == {"tol": 1e-6, "grid": 200, "seed": 0, "max_depth": 12, "gauss_order": 8}


class TestErrors:
    def check_error(self, err, kind):
        doc = json.loads(err[err.index("{") :])
        validate(doc, "error")
        assert doc["error"]["type"] == kind
        return doc["error"]

    def test_malformed_json(self, capsys, tmp_path):
        code, out, err = run(capsys, tmp_path, "moments", None, raw="{oops")
        assert code == 2 and out == ""
        assert "line" in self.check_error(err, "validation")["details"]

    def test_unknown_field(self, capsys, tmp_path):
        doc = dict(EXAMPLES["moments"][0], colour="red")
        code, _, err = run(capsys, tmp_path, "moments", doc)
        assert code == 2
        self.check_error(err, "validation")

    def test_point_inside_disk(self, capsys, tmp_path):
        doc = {"domain": {"shape": "disk"}, "z": [0.5, 0], "w": [2, 0]}
        code, _, err = run(capsys, tmp_path, "kernel", doc)
        assert code == 3
        assert "distance_to_set" in self.check_error(err, "numerical")["details"]

    def test_degenerate_triangle(self, capsys, tmp_path):
        doc = {"triangle": [[0, 0], [1, 0], [2, 0]], "monomial": 1}
        code, _, err = run(capsys, tmp_path, "quadrature-identity", doc)
        assert code == 2
        self.check_error(err, "validation")

    def test_pairs_inside_disk(self, capsys, tmp_path):
        doc = {"kernel": {"type": "disk"}, "points": [[[0.5, 0], [2, 0]]]}
        code, _, err = run(capsys, tmp_path, "positivity", doc)
        assert code == 2
        self.check_error(err, "validation")

    def test_bad_flag_value(self, capsys, tmp_path):
        code, _, err = run(capsys, tmp_path, "moments", EXAMPLES["moments"][0], ["--tol", "0"])
        assert code == 2
        self.check_error(err, "validation")

    def test_missing_subcommand(self, capsys):
        assert main([]) == 2

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2


class TestDriver:
    def test_version(self, capsys):
        assert main(["--version"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["version"] == __version__ and doc["defaults"]["tol"] == 1e-8

    def test_deterministic_bytes(self, capsys, tmp_path):
        doc, flags = EXAMPLES["krein"]
        outs = [run(capsys, tmp_path, "krein", doc, flags)[1] for _ in range(2)]
        assert outs[0] == outs[1]

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "out.json"
        doc, flags = EXAMPLES["sign-moments"]
        code, out, _ = run(capsys, tmp_path, "sign-moments", doc, [*flags, "--output", str(target)])
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["result"]["entries"] == pytest.approx([0, 2, 0], abs=1e-8)

    def test_stdin(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(EXAMPLES["moments"][0])))
        assert main(["moments"]) == 0
        assert json.loads(capsys.readouterr().out)["result"]["order"] == 1
