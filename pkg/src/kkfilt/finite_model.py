"""Element-level verification of the KK-filtration diagram on finite models.

With stable towers of finite groups and finite K_*(B) every node of the
diagram is an explicit finite group.  Limits are kernels of
``Psi(x)_i = x_i - r_i(x_(i+1))`` on the product of the first N stages, and
lim^1 is the cokernel, which is trivial here.  The checks then run over
every element.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .fg import (FgGroup, FgHom, Subgroup, direct_sum_coords, ext_group, ext_induced_contra,
                 finite_groups, hom_group, hom_induced)
from .matrix import IntMatrix
from .tower import DirectTower


def _block_diag(src: FgGroup, dst: FgGroup, blocks: list[FgHom]) -> FgHom:
    rows = [[0] * src.ngens for _ in range(dst.ngens)]
    r0 = c0 = 0
    for b in blocks:
        m = b.matrix
        for i in range(m.rows):
            for j in range(m.cols):
                rows[r0 + i][c0 + j] = m[i, j]
        r0, c0 = r0 + m.rows, c0 + m.cols
    return FgHom(src, dst, IntMatrix.from_rows(rows, src.ngens))


def _enumerate(sub: Subgroup) -> list[tuple[int, ...]]:
    inc = sub.inclusion()
    return sorted({inc(x) for x in inc.source.elements()})


def _coset_count(f: FgHom) -> int:
    return f.target.order // f.image().order()


@dataclass
class _Stage:
    hom: FgGroup
    ext: FgGroup
    kk: FgGroup


class FiniteModel:
    """Explicit groups and maps of the diagram in degree ``n``."""

    def __init__(self, kA: tuple[DirectTower, DirectTower], kB: tuple[FgGroup, FgGroup], n: int):
        self.kA, self.kB, self.n = kA, kB, n
        self.hom_pairs = [(j, (j + n) % 2) for j in (0, 1)]
        self.ext_pairs = [(j, (j + n + 1) % 2) for j in (0, 1)]
        self.N = max(2, *(t.iso_from or 1 for t in kA))
        self.stages = {i: self._stage(i) for i in range(1, self.N + 1)}
        self.r = {i: self._restriction(i) for i in range(1, self.N)}

    def _stage(self, i: int) -> _Stage:
        homs = [hom_group(self.kA[j].stage(i), self.kB[k]).group for j, k in self.hom_pairs]
        exts = [ext_group(self.kA[j].stage(i), self.kB[k]) for j, k in self.ext_pairs]
        return _Stage(direct_sum_coords(homs), direct_sum_coords(exts),
                      direct_sum_coords(homs + exts))

    def _restriction(self, i: int) -> dict[str, FgHom]:
        """Restrictions along ``G_i -> G_(i+1)``: Hom, Ext and KK blocks."""
        a, b = self.stages[i + 1], self.stages[i]
        hb = [hom_induced(self.kA[j].map(i), self.kB[k]) for j, k in self.hom_pairs]
        eb = [ext_induced_contra(self.kA[j].map(i), self.kB[k]) for j, k in self.ext_pairs]
        return {"hom": _block_diag(a.hom, b.hom, hb), "ext": _block_diag(a.ext, b.ext, eb),
                "kk": _block_diag(a.kk, b.kk, hb + eb)}

    def _to_stage(self, part: str, i: int) -> FgHom:
        """Restriction from stage N down to stage i."""
        top = getattr(self.stages[self.N], part)
        f = FgHom.identity(top)
        for t in range(self.N - 1, i - 1, -1):
            f = self.r[t][part].compose(f)
        return f

    def _limit(self, part: str) -> tuple[FgGroup, FgHom, Subgroup]:
        prod = direct_sum_coords([getattr(self.stages[i], part) for i in range(1, self.N + 1)])
        low = direct_sum_coords([getattr(self.stages[i], part) for i in range(1, self.N)])
        rows = [[0] * prod.ngens for _ in range(low.ngens)]
        offs = [0]
        for i in range(1, self.N + 1):
            offs.append(offs[-1] + getattr(self.stages[i], part).ngens)
        for i in range(1, self.N):
            r = self.r[i][part].matrix
            for a in range(r.rows):
                rows[offs[i - 1] + a][offs[i - 1] + a] += 1
                for b in range(r.cols):
                    rows[offs[i - 1] + a][offs[i] + b] -= r[a, b]
        psi = FgHom(prod, low, IntMatrix.from_rows(rows, prod.ngens))
        return prod, psi, psi.kernel()

    def build(self) -> dict:
        top = self.stages[self.N]
        nh = top.hom.ngens
        kk, ext, hom = top.kk, top.ext, top.hom
        pk, psi_k, lim_kk = self._limit("kk")
        pe, psi_e, lim_ext = self._limit("ext")

        down_kk = [self._to_stage("kk", i) for i in range(1, self.N + 1)]
        down_ext = [self._to_stage("ext", i) for i in range(1, self.N + 1)]

        def rho(x):
            return tuple(c for f in down_kk for c in f(x))

        def phi(z):
            return tuple(c for f in down_ext for c in f(z))

        def delta(z):
            return kk.reduce((0,) * nh + tuple(z))

        def gamma(x):
            return hom.reduce(x[:nh])

        def lim_delta(y):
            out, pos = [], 0
            for i in range(1, self.N + 1):
                s = self.stages[i]
                block = y[pos:pos + s.ext.ngens]
                pos += s.ext.ngens
                out += list(s.kk.reduce((0,) * s.hom.ngens + tuple(block)))
            return tuple(out)

        def gamma_tilde(w):
            start = sum(self.stages[i].kk.ngens for i in range(1, self.N))
            return hom.reduce(w[start:start + nh])

        return {"KK": kk, "Ext": ext, "Hom": hom, "lim_KK": lim_kk, "lim_Ext": lim_ext,
                "lim1_KK_order": _coset_count(psi_k), "lim1_Ext_order": _coset_count(psi_e),
                "rho": rho, "phi": phi, "delta": delta, "gamma": gamma,
                "lim_delta": lim_delta, "gamma_tilde": gamma_tilde}


def _fail(failures: list, check: str, **element) -> None:
    failures.append({"check": check, **{k: list(v) if isinstance(v, tuple) else v
                                        for k, v in element.items()}})


def check_model(model: FiniteModel) -> dict:
    m = model.build()
    kk_el = list(m["KK"].elements())
    ext_el = list(m["Ext"].elements())
    hom_el = set(m["Hom"].elements())
    limkk_el = set(_enumerate(m["lim_KK"]))
    limext_el = set(_enumerate(m["lim_Ext"]))
    rho, phi, delta, gamma = m["rho"], m["phi"], m["delta"], m["gamma"]
    ldelta, gtilde = m["lim_delta"], m["gamma_tilde"]
    zero_kk = m["KK"].zero()
    failures: list[dict] = []
    checks = {}

    # squares: sigma and psi are zero since lim^1 KK = 0
    checks["lim1_trivial"] = m["lim1_KK_order"] == 1 and m["lim1_Ext_order"] == 1
    if not checks["lim1_trivial"]:
        _fail(failures, "lim1_trivial", orders=[m["lim1_KK_order"], m["lim1_Ext_order"]])
    checks["square_sigma"] = delta(m["Ext"].zero()) == zero_kk
    ok = True
    for x in kk_el:
        if gtilde(rho(x)) != gamma(x):
            ok = False
            _fail(failures, "square_gamma", element=x)
            break
    checks["square_gamma"] = ok
    ok = True
    for z in ext_el:
        if rho(delta(z)) != ldelta(phi(z)):
            ok = False
            _fail(failures, "square_pullback", element=z)
            break
    checks["square_pullback_commutes"] = ok

    # Milnor row: 0 -> lim^1 -> KK -> lim KK -> 0
    rho_img = {rho(x) for x in kk_el}
    checks["milnor_row"] = checks["lim1_trivial"] and len(rho_img) == len(kk_el) and \
        rho_img == limkk_el
    if not checks["milnor_row"]:
        _fail(failures, "milnor_row", image=len(rho_img), domain=len(kk_el), target=len(limkk_el))

    # UCT row: 0 -> Ext -> KK -> Hom -> 0
    d_img = {delta(z) for z in ext_el}
    ker_g = {x for x in kk_el if not any(gamma(x))}
    g_img = {gamma(x) for x in kk_el}
    checks["uct_row"] = len(d_img) == len(ext_el) and d_img == ker_g and g_img == hom_el
    if not checks["uct_row"]:
        _fail(failures, "uct_row", image_delta=len(d_img), ker_gamma=len(ker_g),
              image_gamma=len(g_img), hom=len(hom_el))

    # left column: 0 -> lim^1 KK -> Ext -> lim Ext -> 0
    phi_img = {phi(z) for z in ext_el}
    checks["left_column"] = checks["lim1_trivial"] and len(phi_img) == len(ext_el) and \
        phi_img == limext_el
    if not checks["left_column"]:
        _fail(failures, "left_column", image=len(phi_img), target=len(limext_el))

    # right column: 0 -> lim Ext -> lim KK -> Hom -> 0
    ld_img = {ldelta(y) for y in limext_el}
    ker_gt = {w for w in limkk_el if not any(gtilde(w))}
    gt_img = {gtilde(w) for w in limkk_el}
    checks["right_column"] = ld_img <= limkk_el and len(ld_img) == len(limext_el) and \
        ld_img == ker_gt and gt_img == hom_el
    if not checks["right_column"]:
        _fail(failures, "right_column", image=len(ld_img), ker=len(ker_gt), onto=len(gt_img))

    # pullback: each compatible (x, y) has exactly one z with delta z = x, phi z = y
    witnesses: dict[tuple, int] = {}
    for z in ext_el:
        key = (delta(z), phi(z))
        witnesses[key] = witnesses.get(key, 0) + 1
    pairs = 0
    ok = True
    rho_of = {x: rho(x) for x in kk_el}
    ld_of = {}
    for y in limext_el:
        ld_of.setdefault(ldelta(y), []).append(y)
    for x in kk_el:
        for y in ld_of.get(rho_of[x], []):
            pairs += 1
            if witnesses.get((x, y), 0) != 1:
                ok = False
                _fail(failures, "pullback", x=x, y=y, witnesses=witnesses.get((x, y), 0))
                break
        if not ok:
            break
    checks["pullback"] = ok

    return {"ok": all(checks.values()), "degree": model.n, "stages": model.N,
            "orders": {"KK": len(kk_el), "Ext": len(ext_el), "Hom": len(hom_el),
                       "lim_KK": len(limkk_el), "lim_Ext": len(limext_el)},
            "checks": checks, "compatible_pairs": pairs, "failures": failures}


def finite_model_check(data, n: int) -> dict:
    """Run the element checks for ``KTheoryData`` with stable finite towers."""
    from .expr import as_fg
    if not data.finite_model:
        raise ValueError("finite model checks need stable towers of finite groups "
                         "and finite K_*(B)")
    kB = tuple(as_fg(e) for e in data.kB)
    return check_model(FiniteModel(data.kA, kB, n))


# --------------------------------------------------------------------------
# randomized instances


def _kk_size(kA, kB, n: int, N: int) -> int:
    size = 1
    for i in range(1, N + 1):
        s = 1
        for j in (0, 1):
            g = kA[j].stage(i)
            s *= hom_group(g, kB[(j + n) % 2]).group.order
            s *= ext_group(g, kB[(j + n + 1) % 2]).order
        size = max(size, s)
    return size


def _random_tower(rng: random.Random, groups: list[FgGroup]) -> DirectTower:
    g2 = rng.choice(groups)
    if rng.random() < 0.25 or g2.is_trivial:
        return DirectTower.stable(g2)
    gens = [rng.choice(list(g2.elements())) for _ in range(rng.randint(1, 2))]
    inc = Subgroup.of(g2, gens).inclusion()
    return DirectTower.explicit([inc.source, g2], [inc])


def random_instances(count: int = 100, seed: int = 0, max_order: int = 32,
                     max_kk: int = 128):
    """Seeded random stable-tower data ``(kA, kB, n)`` with small KK stages."""
    rng = random.Random(seed)
    groups = finite_groups(max_order)
    small = [g for g in groups if g.order <= 8]
    out = []
    while len(out) < count:
        kA = (_random_tower(rng, groups), _random_tower(rng, small))
        kB = (rng.choice(groups), rng.choice(small))
        n = rng.randint(0, 1)
        if _kk_size(kA, kB, n, 2) <= max_kk:
            out.append((kA, kB, n))
    return out


def run_random(count: int = 100, seed: int = 0) -> dict:
    results = [check_model(FiniteModel(kA, kB, n)) for kA, kB, n in random_instances(count, seed)]
    bad = [r for r in results if not r["ok"]]
    return {"instances": len(results), "passed": len(results) - len(bad),
            "failures": [r["failures"] for r in bad][:5],
            "pullback_pairs": sum(r["compatible_pairs"] for r in results)}
