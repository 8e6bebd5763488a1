"""Named systems.

Names accept an optional parameter suffix, ``surprise_weak[n=3]``, and
two derived forms: ``<name>#global`` (drop the local axioms) and
``<name>#sprime`` (the axiom-only standardization).
"""

from __future__ import annotations

import functools
import re

from .schema import UnknownSystem, parse_system

DIST = "K(?phi -> ?psi) -> K(?phi) -> K(?psi)"
SOUND = "K(?phi) -> ?phi"
FOUR = "K(?phi) -> K(K(?phi))"
BOX_DIST = "Box(?phi -> ?psi) -> Box(?phi) -> Box(?psi)"
K_DIST_CONJ = "K(?phi -> ?psi) & K(?phi) -> K(?psi)"
KNOW = "?phi -> Dia(K(?phi))"
STRONG_KNOW = "Dia(K(?phi))"
K_EQ_BOX = "K(?phi) <-> Box(?phi)"


def _exam(n: int) -> str:
    return " | ".join(f"p{i}" for i in range(1, n + 1))


def _observable(n: int) -> str:
    return " & ".join(f"(~T{i} -> K(~T{i}))" for i in range(1, n + 1))


def _surprise(n: int) -> str:
    return " & ".join(f"~K(p{i})" for i in range(1, n + 1))


def _surprise_revised(n: int) -> str:
    return f"({_surprise(n)}) | K(Bot)"


def _lines(name: str, *body: str, validity: str = "taut") -> str:
    head = [f"system {name}"]
    if validity != "taut":
        head.append(f"validity {validity}")
    return "\n".join(head + list(body)) + "\n"


def _moore_flawed(n):
    return _lines(
        "moore_flawed",
        "global pa: pa",
        "global psi: Psi",
        "global unknown: ~K{Psi}",
        "nec K pred",
    )


def _moore_pred(n):
    return _lines(
        "moore_pred",
        "global pa: pa",
        "local psi: Psi",
        "local unknown: ~K{Psi}",
        "nec K pred",
    )


def _moore_op(n):
    return _lines(
        "moore_op",
        "global pa: pa",
        "local psi: Psi",
        "global unknown: ~K(Psi)",
        "nec K",
    )


def _pred_s4(n):
    return _lines(
        "pred_s4",
        "global pa: pa",
        "global dist: K{?phi -> ?psi} -> K{?phi} -> K{?psi}",
        "global four: K{?phi} -> K{K{?phi}}",
        "local sound: K{?phi} -> ?phi",
        "nec K pred",
    )


def _surprise_original(n):
    return _lines(
        "surprise_original",
        f"global sound: {SOUND}",
        f"global dist: {DIST}",
        f"global exam: {_exam(n)}",
        f"global surprise: {_surprise(n)}",
        f"global observable: {_observable(n)}",
        "nec K",
    )


def _surprise_weak(n):
    return _lines(
        "surprise_weak",
        f"local sound: {SOUND}",
        f"global dist: {DIST}",
        f"global exam: {_exam(n)}",
        f"global surprise: {_surprise_revised(n)}",
        f"global observable: {_observable(n)}",
        "nec K",
    )


def _surprise_weak_k2n3(n):
    return _lines(
        "surprise_weak_k2n3",
        f"local sound: {SOUND}",
        f"global dist: {DIST}",
        f"global exam: {_exam(3)}",
        f"global surprise: {_surprise_revised(3)}",
        f"global observable: {_observable(3)}",
        "global not_before: ~T1",
        "nec K",
    )


def _fitch(name, sound, know, know_schema=KNOW, keqbox=None):
    body = [
        f"global box_dist: {BOX_DIST}",
        f"global k_dist: {K_DIST_CONJ}",
    ]
    if keqbox:
        body.append(f"{keqbox} keqbox: {K_EQ_BOX}")
    body += [
        f"{sound} sound: {SOUND}",
        f"{know} know: {know_schema}",
        "nec Box",
        "nec K",
    ]
    return _lines(name, *body)


def _selfcode(n):
    return _lines(
        "selfcode_n",
        f"global dist: {DIST} where closed",
        f"local sound: {SOUND} where closed",
        f"global four: {FOUR} where closed",
        "global ea: ea",
        f"global havingcode: forall x. (K(?phi) <-> InW(pair(x, quote{{?phi}}), {n})) where lonefree(?phi, x)",
        "nec K",
        validity="taut+fo",
    )


def _thomason(n):
    return _lines(
        "thomason",
        "global four: K{?phi} -> K{K{?phi}}",
        "global believed_sound: K{K{?phi} -> ?phi}",
        "global valid: K{?phi} where valid(?phi)",
        "global dist: K{?phi -> ?psi} -> K{?phi} -> K{?psi}",
    )


def _fused(n, know="local", name="fused"):
    return _lines(
        name,
        f"global dist: {DIST}",
        f"global exam: {_exam(n)}",
        f"global observable: {_observable(n)}",
        f"global surprise: {_surprise_revised(n)}",
        f"global box_dist: {BOX_DIST}",
        f"{know} know: {STRONG_KNOW}",
        f"local sound: {SOUND}",
        "nec K",
        "nec Box",
    )


def _gls_like(n):
    return _lines(
        "gls_like",
        "global k: Box(?phi -> ?psi) -> Box(?phi) -> Box(?psi)",
        "global lob: Box(Box(?phi) -> ?phi) -> Box(?phi)",
        "local t: Box(?phi) -> ?phi",
        "nec Box",
    )


def _lob(n):
    return _lines("lob", "global lob: K(K(?phi) -> ?phi) -> K(?phi)")


def _ect(n):
    return _lines(
        "ect",
        "global ect: (forall x. (?phi -> K(?phi))) -> exists e. forall x. (?phi <-> InW(x, e)) where lonefree(?phi, x)",
        validity="taut+fo",
    )


_BUILDERS = {
    "moore_flawed": _moore_flawed,
    "moore_pred": _moore_pred,
    "moore_op": _moore_op,
    "pred_s4": _pred_s4,
    "surprise_original": _surprise_original,
    "surprise_weak": _surprise_weak,
    "surprise_weak_k2n3": _surprise_weak_k2n3,
    "fitch_original": lambda n: _fitch("fitch_original", "global", "global"),
    "fitch_weak": lambda n: _fitch("fitch_weak", "local", "global", STRONG_KNOW),
    "fitch_keqbox": lambda n: _fitch("fitch_keqbox", "local", "local", STRONG_KNOW, keqbox="global"),
    # the four corners of the soundness/knowability/(K=Box) lattice
    "lattice_gsound_lknow": lambda n: _fitch("lattice_gsound_lknow", "global", "local"),
    "lattice_lsound_gknow": lambda n: _fitch("lattice_lsound_gknow", "local", "global", STRONG_KNOW),
    "lattice_gknow_gkeqbox": lambda n: _fitch(
        "lattice_gknow_gkeqbox", "local", "global", STRONG_KNOW, keqbox="global"
    ),
    "lattice_gkeqbox_lknow_lsound": lambda n: _fitch(
        "lattice_gkeqbox_lknow_lsound", "local", "local", STRONG_KNOW, keqbox="global"
    ),
    "selfcode_n": _selfcode,
    "thomason": _thomason,
    "fused": _fused,
    # open: consistency is not known, so it is a search target only
    "fused_gknow": lambda n: _fused(n, "global", "fused_gknow"),
    "gls_like": _gls_like,
    "lob": _lob,
    "ect": _ect,
}

_PARAMETRIC = {"surprise_original", "surprise_weak", "fused", "fused_gknow", "selfcode_n"}
DEFAULT_N = 2

_NAME = re.compile(r"^(?P<base>[a-z0-9_]+)(?:\[n=(?P<n>\d+)\])?(?:#(?P<view>global|sprime))?$")


def names() -> list[str]:
    return sorted(_BUILDERS) + ["selfcode_sprime_n"]


def system_text(base: str, n: int = DEFAULT_N) -> str:
    try:
        return _BUILDERS[base](n)
    except KeyError:
        raise UnknownSystem(f"unknown system {base!r}") from None


@functools.cache
def registry(name: str, n: int | None = None):
    """Look up a system by name; see the module docstring for suffixes."""
    m = _NAME.match(name)
    if m is None:
        raise UnknownSystem(f"unknown system {name!r}")
    base, view = m.group("base"), m.group("view")
    if m.group("n"):
        if n is not None and n != int(m.group("n")):
            raise UnknownSystem(f"conflicting parameters in {name!r}")
        n = int(m.group("n"))
    if base == "selfcode_sprime_n":
        if view:
            raise UnknownSystem(f"unknown system {name!r}")
        from .standardize import sprime_of

        return sprime_of(registry("selfcode_n", n))
    if base not in _BUILDERS:
        raise UnknownSystem(f"unknown system {name!r}")
    if n is not None and base not in _PARAMETRIC:
        raise UnknownSystem(f"{base} takes no parameter")
    n = DEFAULT_N if n is None else n
    if base in ("surprise_original", "surprise_weak", "fused", "fused_gknow") and n < 2:
        raise UnknownSystem(f"{base} needs n > 1")
    system = parse_system(system_text(base, n))
    if n != DEFAULT_N:
        from dataclasses import replace

        system = replace(system, name=f"{base}[n={n}]")
    if view == "global":
        return system.global_fragment()
    if view == "sprime":
        from .standardize import sprime_of

        return sprime_of(system)
    return system
