"""Independent re-validation of certificates.

Deliberately written without the search code: it only reads presentations
through ``has_relation`` / ``relations`` and recomputes everything else.
"""

from __future__ import annotations

from .errors import CertificateError


def _rewrite(word, left, old, new, right):
    n = len(word)
    if len(left) + len(old) + len(right) != n:
        raise CertificateError("step context does not fit the current word")
    if word[: len(left)] != left or word[len(left): len(left) + len(old)] != old or word[n - len(right):] != right:
        raise CertificateError("step does not match the current word")
    return left + new + right


def check_derivation(P, d, u=None, v=None):
    """Replay ``d`` in ``P``; optionally require it to go from ``u`` to ``v``."""
    cur = tuple(d.start)
    if u is not None and cur != tuple(u):
        raise CertificateError("derivation starts at the wrong word")
    for s in d.steps:
        if not P.has_relation(tuple(s.lhs), tuple(s.rhs)):
            raise CertificateError(f"relation {s.lhs} -> {s.rhs} not present")
        if s.direction == "fwd":
            cur = _rewrite(cur, tuple(s.left), tuple(s.lhs), tuple(s.rhs), tuple(s.right))
        elif s.direction == "bwd":
            cur = _rewrite(cur, tuple(s.left), tuple(s.rhs), tuple(s.lhs), tuple(s.right))
        else:
            raise CertificateError(f"bad direction {s.direction!r}")
    if v is not None and cur != tuple(v):
        raise CertificateError("derivation ends at the wrong word")
    return cur


def _evaluate(mul, unit, values, word):
    acc = unit
    for x in word:
        acc = int(mul[acc][values[x]])
    return acc


def _check_table(T):
    n = T.size
    mul = [[int(T.mul[i][j]) for j in range(n)] for i in range(n)]
    e = T.unit
    for i in range(n):
        if mul[e][i] != i or mul[i][e] != i:
            raise CertificateError("table unit is not a unit")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                    raise CertificateError("table is not associative")
    return mul, e


def check_hom_certificate(P, cert):
    """Assignment respects every relation of ``P`` and separates ``cert.u``, ``cert.v``."""
    from .core import Pullback

    mul, e = _check_table(cert.target)
    values = dict(cert.assignment)
    if set(values) != set(P.gens):
        raise CertificateError("assignment is not total on the generators")
    if any(not 0 <= x < len(mul) for x in values.values()):
        raise CertificateError("assignment leaves the table")
    if isinstance(P.rels, Pullback):
        if cert.factor is None:
            raise CertificateError("pullback relations need a factor assignment")
        Q = P.rels.target
        fvals = dict(cert.factor)
        q = dict(P.rels.mapping)
        if set(fvals) != set(Q.gens):
            raise CertificateError("factor assignment not total on the pullback target")
        for g in P.gens:
            if values[g] != fvals[q[g]]:
                raise CertificateError("assignment does not factor through the pullback map")
        for lhs, rhs in Q.relations:
            if _evaluate(mul, e, fvals, lhs) != _evaluate(mul, e, fvals, rhs):
                raise CertificateError("factor assignment violates a target relation")
    else:
        for lhs, rhs in P.relations:
            if _evaluate(mul, e, values, lhs) != _evaluate(mul, e, values, rhs):
                raise CertificateError(f"relation {lhs} -> {rhs} fails under the assignment")
    if _evaluate(mul, e, values, cert.u) == _evaluate(mul, e, values, cert.v):
        raise CertificateError("assignment does not separate the words")


def check_verdict(P, verdict, u, v):
    """Raise unless a Proved/Refuted verdict is backed by a valid certificate for (u, v)."""
    if verdict.status == "proved":
        check_derivation(P, verdict.derivation, u, v)
    elif verdict.status == "refuted":
        c = verdict.certificate
        if (tuple(c.u), tuple(c.v)) != (tuple(u), tuple(v)):
            raise CertificateError("certificate is for a different pair")
        check_hom_certificate(P, c)
