"""Regenerate the JSON schemas shipped in src/momentkernel/schemas."""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "momentkernel" / "schemas"

NUM = {"type": "number"}
NONFINITE = {"oneOf": [{"type": "number"}, {"enum": ["nan", "inf", "-inf"]}]}
INT0 = {"type": "integer", "minimum": 0}


def obj(props, required=(), **extra):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False, **extra}


def array(items, n=None, **extra):
    s = {"type": "array", "items": items, **extra}
    if n is not None:
        s["minItems"] = s["maxItems"] = n
    return s


DEFS = {
    "complex": array(NUM, 2),
    "poly": obj(
        {
            "degree": INT0,
            "coeffs": array({"type": "array", "prefixItems": [INT0, INT0, NUM], "items": False, "minItems": 3}),
        },
        ["coeffs"],
    ),
    "set": obj({"box": array(NUM, 4), "constraints": array({"$ref": "#/$defs/poly"})}, ["box"]),
    "moments": obj({"order": INT0, "entries": array(NUM, minItems=1)}, ["order", "entries"]),
    "shape": {
        "oneOf": [
            obj(
                {"shape": {"const": "disk"}, "radius": {"type": "number", "exclusiveMinimum": 0}, "center": {"$ref": "#/$defs/complex"}},
                ["shape"],
            ),
            obj(
                {
                    "shape": {"const": "annulus"},
                    "r": {"type": "number", "exclusiveMinimum": 0},
                    "R": {"type": "number", "exclusiveMinimum": 0},
                    "center": {"$ref": "#/$defs/complex"},
                },
                ["shape", "r", "R"],
            ),
        ]
    },
    "kernel_def": {
        "oneOf": [
            obj({"type": {"const": "disk"}, "radius": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}}, ["type"]),
            obj(
                {"type": {"const": "annulus"}, "r": {"type": "number", "exclusiveMinimum": 0}, "R": {"type": "number", "exclusiveMinimum": 0, "maximum": 1}},
                ["type", "r", "R"],
            ),
            obj({"type": {"const": "unit"}}, ["type"]),
            obj({"type": {"const": "numeric"}, "set": {"$ref": "#/$defs/set"}}, ["type", "set"]),
        ]
    },
    "pairs": array(array({"$ref": "#/$defs/complex"}, 2), minItems=1),
    "cmatrix": obj({"re": array(array(NUM)), "im": array(array(NUM))}, ["re", "im"]),
    "cvector": obj({"re": array(NUM), "im": array(NUM)}, ["re", "im"]),
    "flags": obj(
        {
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "grid": {"type": "integer", "minimum": 2},
            "seed": {"type": "integer"},
            "max_depth": {"type": "integer", "minimum": 1},
            "gauss_order": {"type": "integer", "minimum": 2},
            "emit_grid": {"type": "boolean"},
        },
        ["tol", "grid", "seed", "max_depth", "gauss_order"],
    ),
}

R = lambda name: {"$ref": f"#/$defs/{name}"}  # noqa: E731

INPUTS = {
    "moments": obj({"set": R("set"), "order": INT0}, ["set", "order"]),
    "kernel": obj(
        {
            "domain": {"oneOf": [R("set"), R("shape")]},
            "z": R("complex"),
            "w": R("complex"),
            "margin": {"type": "number", "exclusiveMinimum": 0},
            "method": {"enum": ["auto", "numeric", "closed_form"]},
        },
        ["domain", "z", "w"],
    ),
    "critical-l": obj({"set": R("set"), "moments": R("moments")}, ["set", "moments"]),
    "krein": obj({"set": R("set"), "moments": R("moments")}, ["set", "moments"]),
    "reconstruct": obj(
        {
            "set": R("set"),
            "moments": R("moments"),
            "variant": {"enum": ["unit", "sign"]},
            "L": {"type": "number", "exclusiveMinimum": 0},
        },
        ["set", "moments"],
    ),
    "chebyshev": obj({"set": R("set"), "moments": R("moments"), "psi": R("poly")}, ["set", "moments", "psi"]),
    "sign-moments": obj({"set": R("set"), "p": R("poly"), "order": INT0}, ["set", "p", "order"]),
    "positivity": obj(
        {"kernel": R("kernel_def"), "points": R("pairs"), "psd_tol": {"type": "number", "exclusiveMinimum": 0}},
        ["kernel", "points"],
    ),
    "factorize": obj(
        {
            "kernel": R("kernel_def"),
            "points": R("pairs"),
            "samples": {"type": "integer", "minimum": 2},
            "holdout": R("pairs"),
        },
        ["kernel"],
    ),
    "quadrature-identity": obj({"triangle": array(R("complex"), 3), "monomial": INT0}),
}

NUMDICT = {"type": "object", "additionalProperties": True}

RESULTS = {
    "moments": R("moments"),
    "kernel": obj(
        {
            "z": R("complex"),
            "w": R("complex"),
            "value_re": NUM,
            "value_im": NUM,
            "method": {"enum": ["numeric", "closed_form"]},
            "error_estimate": NUM,
        },
        ["z", "w", "value_re", "value_im", "method", "error_estimate"],
    ),
    "critical-l": obj({"L0": NONFINITE, "p_star": {"oneOf": [R("poly"), {"type": "null"}]}}, ["L0", "p_star"]),
    "krein": obj({"margin": NUM, "solvable": {"type": "boolean"}, "maximizer": R("poly")}, ["margin", "solvable", "maximizer"]),
    "reconstruct": obj(
        {
            "p": R("poly"),
            "critical_L": NONFINITE,
            "moment_residual": NUM,
            "converged": {"type": "boolean"},
            "variant": {"enum": ["unit", "sign"]},
            "zero_set": array(array(NUM, 2)),
        },
        ["p", "critical_L", "moment_residual", "converged", "variant"],
    ),
    "chebyshev": obj(
        {"min_value": NUM, "max_value": NUM, "p_lower": R("poly"), "p_upper": R("poly")},
        ["min_value", "max_value", "p_lower", "p_upper"],
    ),
    "sign-moments": R("moments"),
    "positivity": obj(
        {
            "gram_psd": {"type": "boolean"},
            "lambda_min": NUM,
            "sandwich": obj(
                {
                    "lower_psd": {"type": "boolean"},
                    "upper_psd": {"type": "boolean"},
                    "lambda_min_lower": NUM,
                    "lambda_min_upper": NUM,
                },
                ["lower_psd", "upper_psd", "lambda_min_lower", "lambda_min_upper"],
            ),
        },
        ["gram_psd", "lambda_min", "sandwich"],
    ),
    "factorize": obj({"dimension": INT0, "T": R("cmatrix"), "xi": R("cvector")}, ["dimension", "T", "xi"]),
    "quadrature-identity": obj(
        {"direct": R("complex"), "two_side": R("complex"), "abs_diff": NUM},
        ["direct", "two_side", "abs_diff"],
    ),
}


def document(schema_id, body):
    return {"$schema": "https://json-schema.org/draft/2020-12/schema", "$id": schema_id, **body, "$defs": DEFS}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, schema in INPUTS.items():
        doc = document(f"{name}.input.json", schema)
        (OUT / f"{name}.input.json").write_text(json.dumps(doc, indent=2) + "\n")
        out = obj(
            {
                "inputs_echo": obj({"input": INPUTS[name], "flags": R("flags")}, ["input", "flags"]),
                "result": RESULTS[name],
                "diagnostics": NUMDICT,
            },
            ["inputs_echo", "result", "diagnostics"],
        )
        (OUT / f"{name}.output.json").write_text(json.dumps(document(f"{name}.output.json", out), indent=2) + "\n")
    err = obj(
        {
            "error": obj(
                {"type": {"enum": ["validation", "numerical"]}, "message": {"type": "string"}, "details": {}},
                ["type", "message"],
            )
        },
        ["error"],
    )
    (OUT / "error.json").write_text(json.dumps(document("error.json", err), indent=2) + "\n")


if __name__ == "__main__":
    main()
