"""u-invariant and generalised strong u-invariant of supported towers.

Both invariants multiply by ``[vK:2vK]`` when passing from the residue field to
the henselian field, so a tower's value is ``index2 * base value``.  Base values
are classical facts, each row tagged with the fact it comes from (see
:func:`facts_table`).  ``uhat`` lives in ``1/2 N``; it is carried internally as
twice its value to stay integral.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .fieldtower import FieldDesc, FiniteField, PadicBottom, QuadClosed, RealClosed
from .valgroup import index_mod_n

FACTS_VERSION = "facts_v1"


@dataclass(frozen=True)
class Fact:
    id: str
    statement: str
    hypothesis: str
    value: str
    anchor: str


_FACTS = (
    Fact(
        "MMW",
        "u(K)=2u(Kv)",
        "v discrete and henselian; in characteristic 2 an imperfection-degree condition on K and Kv",
        "u doubles across one discrete henselian level",
        "theorem of Kaplansky and Mamone-Moresi-Wadsworth",
    ),
    Fact(
        "Lang",
        "K is a C1-field",
        "v henselian discrete, char(K)=0, Kv algebraically closed",
        "uhat(K)=2; u(F) <= 2^(i+1) for F/K of transcendence degree i",
        "theorem of Lang on C_i-fields",
    ),
    Fact(
        "PS",
        "u(F)=8 if K has a finite field extension of even degree, and otherwise u(F)=4",
        "v henselian discrete, char(K)=0, Kv perfect of characteristic 2, F/K a function field in one variable",
        "u(F)=4*uhat(Kv)",
        "theorem of Parimala and Suresh",
    ),
    Fact(
        "u-hens",
        "u(K)=[vK:2vK]*u(Kv)",
        "K henselian valued, char(Kv) != 2, [vK:2vK] finite",
        "u multiplies by the index of 2vK in vK",
        "transfer of the u-invariant to henselian fields",
    ),
    Fact(
        "main-body",
        "uhat(K)=[vK:2vK]*uhat(Kv)",
        "K henselian valued, char(Kv) != 2, [vK:2vK] finite",
        "uhat multiplies by the index of 2vK in vK",
        "transfer of the strong u-invariant to henselian fields",
    ),
    Fact(
        "herquacl",
        "uhat(K)=1",
        "K(sqrt(-1)) has no finite field extension of even degree",
        "u(F)=2 for every function field in one variable F/K(sqrt(-1))",
        "quadratically closed and real closed bases",
    ),
    Fact(
        "BL",
        "anisotropic form of dimension [vK:2vK]*dim(Phi) from anisotropic Phi over Kv",
        "K henselian valued, char(Kv) != 2, Phi anisotropic torsion over Kv",
        "u(K) >= [vK:2vK]*u(Kv)",
        "orthogonal sum of c_I*Phi over subsets I of independent value classes",
    ),
    Fact(
        "base-finite",
        "u(F_q)=2, uhat(F_q)=2",
        "q odd",
        "u=2, uhat=2",
        "Chevalley-Warning; function fields over finite fields have u=4",
    ),
    Fact(
        "base-real-closed",
        "u(R)=0, uhat(R)=1",
        "R real closed; u counts anisotropic torsion forms",
        "u=0, uhat=1",
        "torsion forms over R are hyperbolic; R(sqrt(-1)) is algebraically closed",
    ),
    Fact(
        "base-quad-closed",
        "u(K)=1, uhat(K)=1",
        "K quadratically closed",
        "u=1, uhat=1",
        "every binary form is isotropic",
    ),
    Fact(
        "base-padic",
        "u(Q_p)=4, uhat(Q_p)=4",
        "p odd",
        "u=4, uhat=4",
        "u-transfer applied to F_p; function fields over Q_p have u=8",
    ),
    Fact(
        "open-uhat-rational",
        "Is uhat(K(X)) = 2*uhat(K)?",
        "open question",
        "unknown",
        "open question on rational function fields",
    ),
    Fact(
        "open-uhat-finite-ext",
        "Is uhat(L) <= uhat(K) for finite extensions L/K?",
        "open question",
        "unknown",
        "open question on finite extensions",
    ),
)


def facts_table() -> list[Fact]:
    return list(_FACTS)


def fact(fact_id: str) -> list[Fact]:
    """Rows with the given id; empty when unknown."""
    return [f for f in _FACTS if f.id == fact_id]


def index2(K: FieldDesc) -> int:
    """``[vK:2vK]`` via the lattice index of the Z-levels of the value group."""
    z = sum(K.zmask)
    g, _, _ = index_mod_n(z, [], 2)
    return g


def _base_u(base) -> tuple[int, str]:
    if isinstance(base, FiniteField):
        return 2, "base-finite"
    if isinstance(base, RealClosed):
        return 0, "base-real-closed"
    if isinstance(base, QuadClosed):
        return 1, "base-quad-closed"
    if isinstance(base, PadicBottom):
        # the p-adic level is counted in index2; what remains is F_p
        return 2, "base-finite"
    raise TypeError(f"unsupported base {base!r}")


def _base_uhat2(base) -> tuple[int, str]:
    """Twice the strong u-invariant of the bottom residue field."""
    if isinstance(base, (FiniteField, PadicBottom)):
        return 4, "base-finite"
    if isinstance(base, RealClosed):
        return 2, "herquacl"
    if isinstance(base, QuadClosed):
        return 2, "herquacl"
    raise TypeError(f"unsupported base {base!r}")


def herquacl(base) -> bool:
    """Does adjoining sqrt(-1) leave no finite extension of even degree?"""
    return isinstance(base, (QuadClosed, RealClosed))


def u_of(K: FieldDesc) -> int:
    return index2(K) * _base_u(K.base)[0]


def uhat_of(K: FieldDesc) -> int | Fraction:
    v = Fraction(index2(K) * _base_uhat2(K.base)[0], 2)
    return int(v) if v.denominator == 1 else v


@dataclass
class UReport:
    u: int
    uhat: int | Fraction
    index2: int
    base_facts: list = field(default_factory=list)

    @property
    def ffiov_u_bound(self):
        """u of function fields in one variable is at most 2*uhat."""
        return 2 * self.uhat

    def to_dict(self) -> dict:
        uh = self.uhat
        return {
            "schema": "ureport_v1",
            "u": self.u,
            "uhat": uh if isinstance(uh, int) else str(uh),
            "ffiov_u_bound": self.ffiov_u_bound if isinstance(uh, int) else str(self.ffiov_u_bound),
            "index2": self.index2,
            "base_facts": self.base_facts,
        }


def report(K: FieldDesc) -> UReport:
    u_base, u_src = _base_u(K.base)
    uh2, uh_src = _base_uhat2(K.base)
    ix = index2(K)
    residue = K.terminal()
    facts = [
        {"quantity": "index2", "value": ix, "fact": "u-hens", "anchor": fact("u-hens")[0].statement},
        {"quantity": "u", "base": str(residue), "value": u_base, "fact": u_src, "anchor": fact(u_src)[0].statement},
        {
            "quantity": "uhat",
            "base": str(residue),
            "value": uh2 // 2,
            "fact": uh_src,
            "anchor": fact(uh_src)[0].statement,
        },
        {"quantity": "transfer", "fact": "main-body", "anchor": fact("main-body")[0].statement},
    ]
    return UReport(u_of(K), uhat_of(K), ix, facts)
