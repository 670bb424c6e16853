"""End-to-end checks of the parisian command-line tool."""

import argparse
import csv
import io
import json
import math
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

MODELS = {
    "one": {"sigma": [[1]], "mu": [1], "alpha": [1]},
    "boundary": {"sigma": [[1, 0.5], [0.5, 1]], "mu": [1, 0.5], "alpha": [1, 0.5]},
    "joint": {"sigma": [[1, 0], [0, 1]], "mu": [1, 0.5], "alpha": [1, 0.5]},
    "second": {"sigma": [[1, 0.9], [0.9, 1]], "mu": [1, 2], "alpha": [1, 2]},
    "factor": {"a": [[1, 0], [0.5, 1]], "mu": [1, 1], "alpha": [1, 1]},
    "not_pd": {"sigma": [[1, 2], [2, 1]], "mu": [1, 1], "alpha": [1, 1]},
    "bad_drift": {"sigma": [[1]], "mu": [-1], "alpha": [1]},
}


class Runner:
    def __init__(self, binary: str, schema: str, workdir: Path):
        self.binary = binary
        self.validator = jsonschema.Draft202012Validator(json.loads(Path(schema).read_text()))
        self.dir = workdir
        for name, model in MODELS.items():
            (workdir / f"{name}.json").write_text(json.dumps(model))
        (workdir / "garbled.json").write_text("{not json")
        self.failures = 0

    def model(self, name: str) -> str:
        return str(self.dir / f"{name}.json")

    def run(self, *args: str):
        proc = subprocess.run([self.binary, *args], capture_output=True, text=True, timeout=600)
        return proc.returncode, proc.stdout, proc.stderr

    def json(self, *args: str) -> dict:
        code, out, err = self.run(*args)
        if code != 0:
            raise AssertionError(f"{args} exited {code}: {err}")
        doc = json.loads(out)
        self.validator.validate(doc)
        return doc

    def csv(self, *args: str):
        code, out, err = self.run(*args)
        if code != 0:
            raise AssertionError(f"{args} exited {code}: {err}")
        comments = [line for line in out.splitlines() if line.startswith("#")]
        rows = list(csv.DictReader(io.StringIO("\n".join(l for l in out.splitlines() if not l.startswith("#")))))
        return comments, rows

    def check(self, name: str, condition: bool, detail: str = "") -> None:
        print(f"{'ok  ' if condition else 'FAIL'} {name} {detail}")
        if not condition:
            self.failures += 1


def case_schema(r: Runner) -> None:
    docs = [
        r.json("qp", "--model", r.model("one")),
        r.json("qp", "--model", r.model("factor"), "--t", "0.5"),
        r.json("asym", "--model", r.model("one"), "--u-list", "1,2,400", "--format", "json", "--seed", "1"),
        r.json("asym", "--model", r.model("factor"), "--r", "0.1", "--u-list", "1", "--format", "json",
               "--h-mc", "200,4,0", "--seed", "2"),
        r.json("simulate", "--model", r.model("one"), "--u", "1", "--paths", "200", "--seed", "3", "--times"),
        r.json("two-dim", "--model", r.model("boundary"), "--u", "2", "--cond", "0", "0.5", "--seed", "4"),
        r.json("two-dim", "--model", r.model("joint"), "--u", "2", "--h-paths", "100", "--h-horizon", "4",
               "--seed", "5"),
        r.json("hconst", "--model", r.model("one"), "--T-ladder", "4,8", "--paths", "100", "--format", "json",
               "--half-step", "--seed", "6"),
    ]
    r.check("schema: all json outputs validate", len(docs) == 8)
    r.check("schema: index sets are 1-based", docs[0]["results"]["I"] == [1])


def case_exit_codes(r: Runner) -> None:
    code, out, err = r.run("qp", "--model", str(r.dir / "missing.json"))
    r.check("exit: missing file gives 2", code == 2, f"(got {code})")
    r.check("exit: message on standard error", out == "" and "missing.json" in err)
    code, _, _ = r.run("qp", "--model", str(r.dir / "garbled.json"))
    r.check("exit: malformed json gives 3", code == 3, f"(got {code})")
    code, _, _ = r.run("qp", "--model", r.model("not_pd"))
    r.check("exit: indefinite sigma gives 4", code == 4, f"(got {code})")
    code, _, _ = r.run("qp", "--model", r.model("bad_drift"))
    r.check("exit: negative drift gives 4", code == 4, f"(got {code})")
    code, _, _ = r.run("asym", "--model", r.model("one"))
    r.check("exit: missing required flag gives 1", code == 1, f"(got {code})")
    code, _, _ = r.run("qp", "--model", r.model("one"))
    r.check("exit: success gives 0", code == 0)


def strip_wall_time(text: str) -> str:
    return "\n".join(line for line in text.splitlines() if '"wall_time"' not in line)


def case_determinism(r: Runner) -> None:
    args = ["simulate", "--model", r.model("one"), "--u", "1", "--paths", "2000", "--seed", "17"]
    a = r.run(*args)[1]
    b = r.run(*args)[1]
    r.check("determinism: simulate repeats byte-identically", strip_wall_time(a) == strip_wall_time(b))
    h = ["hconst", "--model", r.model("one"), "--T-ladder", "4", "--paths", "300", "--seed", "9"]
    r.check("determinism: hconst csv repeats", r.run(*h)[1] == r.run(*h)[1])
    doc = r.json("simulate", "--model", r.model("one"), "--u", "1", "--paths", "100")
    r.check("determinism: entropy seed is echoed", isinstance(doc.get("seed"), int) and doc["config"]["seed"] == doc["seed"])
    doc2 = r.json("simulate", "--model", r.model("one"), "--u", "1", "--paths", "100", "--seed", str(doc["seed"]))
    r.check("determinism: echoed seed reproduces", doc2["results"] == doc["results"])


def case_examples(r: Runner) -> None:
    doc = r.json("qp", "--model", r.model("one"), "--t", "1.0")
    res = doc["results"]
    r.check("qp: fields present", all(k in res for k in ("I", "K", "J", "solution", "value")))
    r.check("qp: value at t=1", abs(res["value"] - 4.0) < 1e-12)
    r.check("qp: default t is t0", r.json("qp", "--model", r.model("one"))["results"]["t_source"] == "t0")

    _, rows = r.csv("asym", "--model", r.model("one"), "--u-list", "2")
    r.check("asym: d=1, u=2", abs(float(rows[0]["value"]) - 0.0183156389) < 1e-9, rows[0]["value"])
    _, rows = r.csv("asym", "--model", r.model("one"), "--u-list", "1,2,3")
    logs = [float(x["log_value"]) for x in rows]
    r.check("asym: three rows", len(rows) == 3)
    r.check("asym: log column affine-decreasing",
            logs[0] > logs[1] > logs[2] and abs((logs[2] - logs[1]) - (logs[1] - logs[0])) < 1e-12)
    doc = r.json("asym", "--model", r.model("one"), "--u-list", "400", "--format", "json")
    row = doc["results"]["rows"][0]
    r.check("asym: underflow gives null value and a log value", row["value"] is None and row["log_value"] == -800)

    doc = r.json("simulate", "--model", r.model("one"), "--u", "1", "--r", "10", "--paths", "500")
    r.check("simulate: budget beyond horizon gives 0", doc["results"]["p_hat"] == 0)

    doc = r.json("two-dim", "--model", r.model("boundary"))
    r.check("two-dim: boundary pair is i.R2", doc["results"]["regime"] == "i.R2"
            and doc["results"]["ghat"] == 4 and doc["results"]["gtilde"] == 2)
    doc = r.json("two-dim", "--model", r.model("joint"), "--h-paths", "50", "--h-horizon", "2")
    r.check("two-dim: independent pair is i.R1", doc["results"]["regime"] == "i.R1")
    doc = r.json("two-dim", "--model", r.model("second"))
    r.check("two-dim: strong correlation is ii.R3", doc["results"]["regime"] == "ii.R3"
            and abs(doc["results"]["ghat"] - 16) < 1e-12)

    comments, rows = r.csv("hconst", "--model", r.model("one"), "--r", "1", "--T-ladder", "8,16", "--paths", "4000",
                           "--seed", "21")
    last = rows[-1]
    value, se = float(last["value"]), float(last["std_error"])
    r.check("hconst: r=1 within 3 SE of the closed form", abs(value - 0.1506796) < 3 * se, f"{value} +- {se}")
    r.check("hconst: config echoed", any(c.startswith("# seed=21") for c in comments))
    _, rows = r.csv("hconst", "--model", r.model("one"), "--r", "0", "--T-ladder", "8,16", "--paths", "4000",
                    "--seed", "22")
    value, se = float(rows[-1]["value"]), float(rows[-1]["std_error"])
    r.check("hconst: r=0 within 3 SE of 1", abs(value - 1.0) < 3 * se, f"{value} +- {se}")
    r.check("hconst: SE column positive", all(float(x["std_error"]) > 0 for x in rows))


CASES = {
    "schema": case_schema,
    "exit_codes": case_exit_codes,
    "determinism": case_determinism,
    "examples": case_examples,
}


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--binary", required=True)
    parser.add_argument("--schema", required=True)
    parser.add_argument("--case", choices=sorted(CASES), required=True)
    args = parser.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        runner = Runner(args.binary, args.schema, Path(tmp))
        try:
            CASES[args.case](runner)
        except (AssertionError, jsonschema.ValidationError, json.JSONDecodeError) as exc:
            print(f"FAIL {args.case}: {exc}")
            return 1
        return 1 if runner.failures else 0


if __name__ == "__main__":
    sys.exit(main())
