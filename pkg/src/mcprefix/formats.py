"""Text formats for codebooks and probability lists.

Codebook::

    channels: 2 2
    codeword: 0 | -
    codeword: 11 | 1

Probabilities::

    p: 1/2
    p: 1/4

``#`` starts a comment; ``-`` is the empty string.
"""

from __future__ import annotations

from fractions import Fraction

from .codes import DIGITS, ChannelSpec, Codebook, ProbMultiset, Word


class FormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _lines(text: str):
    for k, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield k, line


def _component(tok: str, q: int, lineno: int) -> tuple[int, ...]:
    tok = tok.strip()
    if tok == "-":
        return ()
    if not tok:
        raise FormatError(lineno, "empty component; write '-' for the empty string")
    out = []
    for ch in tok:
        if ch not in DIGITS:
            raise FormatError(lineno, f"bad symbol {ch!r}")
        s = DIGITS.index(ch)
        if s >= q:
            raise FormatError(lineno, f"symbol {ch!r} not below alphabet size {q}")
        out.append(s)
    return tuple(out)


def parse_codebook(text: str) -> Codebook:
    spec = None
    words = []
    for lineno, line in _lines(text):
        key, sep, rest = line.partition(":")
        if not sep:
            raise FormatError(lineno, "expected 'channels:' or 'codeword:'")
        key = key.strip()
        if key == "channels":
            if spec is not None:
                raise FormatError(lineno, "duplicate channels header")
            try:
                sizes = tuple(int(x) for x in rest.split())
                spec = ChannelSpec(sizes)
            except ValueError as e:
                raise FormatError(lineno, str(e)) from None
            if any(q > len(DIGITS) for q in sizes):
                raise FormatError(lineno, f"alphabet sizes above {len(DIGITS)} cannot be written")
        elif key == "codeword":
            if spec is None:
                raise FormatError(lineno, "codeword before channels header")
            toks = rest.split("|")
            if len(toks) != spec.n:
                raise FormatError(lineno, f"expected {spec.n} components, got {len(toks)}")
            words.append((lineno, Word(tuple(_component(t, q, lineno) for t, q in zip(toks, spec.sizes)))))
        else:
            raise FormatError(lineno, f"unknown key {key!r}")
    if spec is None:
        raise FormatError(0, "missing channels header")
    seen = {}
    for lineno, word in words:
        if word in seen:
            raise FormatError(lineno, f"duplicate codeword (first on line {seen[word]})")
        seen[word] = lineno
    try:
        return Codebook(spec, tuple(w for _, w in words))
    except ValueError as e:
        raise FormatError(words[-1][0] if words else 0, str(e)) from None


def format_codebook(cb: Codebook) -> str:
    out = ["channels: " + " ".join(map(str, cb.spec.sizes))]
    for c in cb:
        comps = ["".join(DIGITS[s] for s in comp) if comp else "-" for comp in c.components]
        out.append("codeword: " + " | ".join(comps))
    return "\n".join(out) + "\n"


def parse_probs(text: str, require_distribution: bool = True) -> ProbMultiset:
    probs = []
    for lineno, line in _lines(text):
        key, sep, rest = line.partition(":")
        if not sep or key.strip() != "p":
            raise FormatError(lineno, "expected 'p: <num>/<den>'")
        try:
            probs.append(Fraction(rest.strip()))
        except (ValueError, ZeroDivisionError):
            raise FormatError(lineno, f"bad rational {rest.strip()!r}") from None
        if not 0 < probs[-1] <= 1:
            raise FormatError(lineno, f"probability {probs[-1]} outside (0, 1]")
    pm = ProbMultiset(tuple(probs))
    if require_distribution and not pm.is_distribution():
        raise FormatError(0, f"probabilities sum to {pm.total}, not 1")
    return pm


def format_probs(p: ProbMultiset) -> str:
    return "".join(f"p: {x.numerator}/{x.denominator}\n" for x in p)
