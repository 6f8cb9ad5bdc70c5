"""Golden scenarios with stored expected outputs.

Each case is a job line plus expected values at dotted paths of its report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .finite_model import run_random

CONTINUUM = "continuum"


@dataclass(frozen=True)
class CatalogCase:
    job: str
    expect: dict = field(default_factory=dict)


def _jensen_profile(n_max: int = 12) -> dict:
    return {f"result.jensen.stages.{n - 1}.kernel": f"prod_(k>{n}) Z/2"
            for n in range(1, n_max + 1)}


def _remark24() -> list[CatalogCase]:
    data = "K0A=elementary(2,1) K1A=0 K0B=Z K1B=0"
    return [
        CatalogCase("pext --tower elementary(2,1) --target Z", {
            "result.ext.value": "InfProduct(Z/2)",
            "result.ext.profile.cardinality": CONTINUUM,
            "result.ext.profile.exponent": 2,
            "result.pext.verdict": "Zero",
            "result.zadic.discrete": True,
            "result.zadic.consistent": True,
            "result.jensen.discrete": False,
            **_jensen_profile(),
        }),
        CatalogCase(f"uct-report {data}", {
            "result.degrees.1.fine_structure.verdict": "Zero",
            "result.degrees.1.topology.zadic_discrete_ext": True,
            "result.degrees.1.topology.jensen_discrete": False,
            "result.degrees.1.topology.hausdorff": True,
            "result.lim1_gamma.degrees.0.kk_lim1": "Zero",
            "result.lim1_gamma.degrees.0.hom_lim1": "Zero",
            "result.lim1_gamma.agree": True,
        }),
        CatalogCase(f"diagram-check {data} --degree 1", {
            "result.degrees.1.groups.lim1_KK.value": "0",
            "result.degrees.1.groups.Ext.value": "InfProduct(Z/2)",
            "result.degrees.1.groups.lim_Ext.value": "InfProduct(Z/2)",
            "result.degrees.1.exactness.left_column.status": "RuleDerived",
        }),
    ]


def _remark46() -> list[CatalogCase]:
    data = "K0A=elementary(2,1) K1A=0 K0B=Z/2 K1B=0"
    return [
        CatalogCase(f"uct-report {data}", {
            "result.degrees.1.kk.KK.value": "InfProduct(Z/2)",
            "result.degrees.1.kk.KK.profile.cardinality": CONTINUUM,
            "result.degrees.1.kk.KK.profile.exponent": 2,
            "result.degrees.1.kk.Ext.value": "InfProduct(Z/2)",
            "result.degrees.1.kk.Hom.value": "0",
            "result.degrees.0.kk.KK.value": "InfProduct(Z/2)",
            "result.degrees.0.kk.Ext.value": "0",
            "result.degrees.1.fine_structure.verdict": "Zero",
            "result.degrees.1.fine_structure.closure_of_zero.value": "0",
            "result.degrees.1.kl.value": "InfProduct(Z/2)",
            "result.degrees.1.obstructions.m.verdict": "Vanishes",
            "result.degrees.1.obstructions.j.verdict": "Vanishes",
        }),
    ]


def _example53(p: int) -> list[CatalogCase]:
    data = f"K0A=prufer({p}) K1A=0 K0B=0 K1B=InfSum({p}; n)"
    return [
        CatalogCase(f"pext --tower prufer({p}) --target InfSum({p}; n)", {
            "result.pext.verdict": "NonzeroCertified",
            "result.pext.certificate.decided_by": ["SelfSimilarStrictDescent"],
            "result.pext.rule.verdict": "NoVerdict",
            "result.lim_ext.value": f"Padic({p}; InfSum({p}; n))",
        }),
        CatalogCase(f"uct-report {data}", {
            "result.degrees.0.kk.Hom.value": "0",
            "result.degrees.1.kk.Hom.value": "0",
            "result.degrees.0.fine_structure.verdict": "NonzeroCertified",
            "result.degrees.0.fine_structure.pieces.0.certificate.decided_by":
                ["SelfSimilarStrictDescent"],
            "result.degrees.0.kl.value": f"Padic({p}; InfSum({p}; n))",
            "result.degrees.0.kk.Ext.extension.split": "No",
            "result.degrees.0.obstructions.m.verdict": "NonzeroPaperBacked",
            "result.degrees.0.obstructions.j.verdict": "NonzeroPaperBacked",
            "result.degrees.0.obstructions.j.metadata.order": "infinite",
            "result.degrees.0.topology.hausdorff": False,
            "result.lim1_gamma.degrees.1.kk_lim1": "NonzeroCertified",
            "result.lim1_gamma.degrees.1.hom_lim1": "NonzeroCertified",
            "result.lim1_gamma.agree": True,
        }),
        CatalogCase(f"diagram-check {data} --degree 0", {
            "result.degrees.0.groups.Hom.value": "0",
            "result.degrees.0.groups.lim_KK.value": f"Padic({p}; InfSum({p}; n))",
            "result.degrees.0.groups.lim_Ext.value": f"Padic({p}; InfSum({p}; n))",
            "result.degrees.0.obstructions.m.verdict": "NonzeroPaperBacked",
        }),
    ]


# (tower, target, verdict of the rule engine)
RULE_SUITE = [
    ("elementary(2,1)", "Z", "Zero"),
    ("elementary(3,2)", "Prufer(3)", "Zero"),
    ("stable(Z/6)", "InfSum(2; n)", "Zero"),
    ("stable(Z^2)", "InfSum(3; n)", "Zero"),
    ("stable(Z)", "Z", "Zero"),
    ("affine(2; n)", "Z", "Zero"),
    ("prufer(2)", "Prufer(2)", "Zero"),
    ("prufer(2)", "Padic(2; InfSum(2; n))", "Zero"),
    ("prufer(3)", "Z/9", "Zero"),
    ("free(3)", "Z/3", "Zero"),
    ("free(2)", "Z", "Divisible"),
    ("free(6)", "Z[1/2]", "Divisible"),
    ("prufer(2)", "Z", "Divisible"),
    ("prufer(5)", "Z^2", "Divisible"),
]


def _rule_suite() -> list[CatalogCase]:
    out = []
    for tower, target, verdict in RULE_SUITE:
        expect = {"result.pext.rule.verdict": verdict}
        if verdict == "Zero":
            expect["result.pext.verdict"] = "Zero"
        else:
            expect["result.pext.divisible"] = True
        out.append(CatalogCase(f"pext --tower {tower} --target {target}", expect))
    # both obstructions vanish under either rule
    out.append(CatalogCase("uct-report K0A=free(2) K1A=0 K0B=Z K1B=0", {
        "result.degrees.1.obstructions.m.verdict": "Vanishes",
        "result.degrees.1.obstructions.j.verdict": "Vanishes",
    }))
    return out


def _finite_models() -> list[CatalogCase]:
    checks = ("milnor_row", "uct_row", "left_column", "right_column", "pullback")
    cases = []
    for data in ("K0A=Z/4 K1A=0 K0B=Z/4 K1B=0", "K0A=0 K1A=0 K0B=0 K1B=0",
                 "K0A=explicit(Z/2, Z/4; [[[2]]]) K1A=Z/3 K0B=Z/8 K1B=Z/6"):
        expect = {}
        for n in ("0", "1"):
            expect[f"result.degrees.{n}.finite_model.ok"] = True
            for c in checks:
                expect[f"result.degrees.{n}.finite_model.checks.{c}"] = True
                key = c if c != "pullback" else None
                if key:
                    expect[f"result.degrees.{n}.exactness.{key}.status"] = "Verified"
        cases.append(CatalogCase(f"diagram-check {data}", expect))
    return cases


CATALOG = {
    "remark24": _remark24,
    "remark46": _remark46,
    "example53": lambda: _example53(2) + _example53(3),
    "thm52-suite": _rule_suite,
    "finite-models": _finite_models,
}

RANDOM_MODELS = 100


def cases(name: str) -> list[CatalogCase]:
    return CATALOG[name]()


def lookup(report, path: str):
    cur = report
    for part in path.split("."):
        if isinstance(cur, list):
            cur = cur[int(part)]
        elif isinstance(cur, dict) and part in cur:
            cur = cur[part]
        else:
            raise KeyError(path)
    return cur


def run_case(case: CatalogCase, window: int) -> dict:
    from .jobs import execute, parse_input
    from dataclasses import replace
    job = parse_input(case.job)
    if window != job.window:
        job = replace(job, window=window)
    report = execute(job)
    mismatches = []
    for path, want in sorted(case.expect.items()):
        try:
            got = lookup(report, path)
        except (KeyError, IndexError):
            got = "<missing>"
        if got != want:
            mismatches.append({"path": path, "expected": want, "got": got})
    return {"input": case.job, "checked": len(case.expect), "ok": not mismatches,
            "mismatches": mismatches}


def run_catalog(name: str, window: int = 12) -> dict:
    results = [run_case(c, window) for c in cases(name)]
    if name == "finite-models":
        r = run_random(RANDOM_MODELS, seed=0)
        results.append({"input": f"random stable-tower models ({RANDOM_MODELS}, seed 0)",
                        "checked": r["instances"], "ok": r["passed"] == RANDOM_MODELS,
                        "mismatches": [] if r["passed"] == RANDOM_MODELS else
                        [{"path": "passed", "expected": RANDOM_MODELS, "got": r["passed"],
                          "failures": r["failures"]}],
                        "pullback_pairs": r["pullback_pairs"]})
    return {"catalog": name, "cases": results, "ok": all(r["ok"] for r in results)}
