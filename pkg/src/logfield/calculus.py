"""Formal derivation ``F' = sum a_m m'`` on generalized series."""

from .monomials import ONE_MONO, Monomial
from .series import GridCertificate, Series, Term, sum_stream


def _multipliers(top_level):
    # (log_i)'/log_i for i = -1 .. top_level
    out = [ONE_MONO]
    for i in range(0, top_level + 1):
        out.append(Monomial.from_dict({j: -1 for j in range(0, i + 1)}))
    return out


def derivative_cert(cert):
    top = max([m.max_level for m in cert.bases | cert.generators] + [-1])
    mults = _multipliers(top)
    return GridCertificate(frozenset(b * d for b in cert.bases for d in mults), cert.generators)


def derivative(F):
    """Term-wise derivative, merged under the watermark rule.

    Every term of ``m'`` is at most ``m`` (all multipliers are <= 1), so the
    derivative of the k-th source term is a part bounded by that term.
    """

    def gen():
        def parts():
            for a, m in F.raw():
                if a == 0:
                    yield (m, (Term(a, m),))
                else:
                    yield (m, [Term(a * r, n) for r, n in m.derivative()])

        return sum_stream(parts())

    return Series(gen, lambda: derivative_cert(F.cert))


def nth_derivative(F, i):
    for _ in range(i):
        F = derivative(F)
    return F


def derivative_closure_cert(cert):
    """Certificate covering every iterated derivative of a series with ``cert``."""
    top = max([m.max_level for m in cert.bases | cert.generators] + [-1])
    extra = frozenset(m for m in _multipliers(top) if not m.is_one)
    return GridCertificate(cert.bases, cert.generators | extra)
