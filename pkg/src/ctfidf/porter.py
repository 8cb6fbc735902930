"""Porter suffix-stripping stemmer.

Implements the 1980 algorithm, steps 1a through 5b, matching the behavior
of the author's canonical ANSI C implementation. That reference version
departs from the published paper in a few places that are deliberately
reproduced here:

* words of length 1 or 2 are returned unchanged,
* step 2 maps ``bli`` to ``ble`` (the paper had ``abli`` to ``able``),
* step 2 includes the extra rule ``logi`` to ``log``.

Only lowercase ASCII-alphabetic tokens are stemmed; anything else (digit
runs, mixed tokens, non-ASCII) passes through unchanged.
"""

from __future__ import annotations

_VOWELS = "aeiou"


class _Buffer:
    """Mutable word buffer with the measure/ends/setto primitives.

    ``k`` is the index of the last live character and ``j`` marks the
    start of the suffix most recently matched by :meth:`ends`.
    """

    __slots__ = ("b", "k", "j")

    def __init__(self, word: str):
        self.b = list(word)
        self.k = len(word) - 1
        self.j = 0

    def cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in _VOWELS:
            return False
        if ch == "y":
            return True if i == 0 else not self.cons(i - 1)
        return True

    def m(self) -> int:
        """Count of vowel-consonant sequences in b[0..j]."""
        n = 0
        i = 0
        while True:
            if i > self.j:
                return n
            if not self.cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > self.j:
                    return n
                if self.cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > self.j:
                    return n
                if not self.cons(i):
                    break
                i += 1
            i += 1

    def vowel_in_stem(self) -> bool:
        return any(not self.cons(i) for i in range(self.j + 1))

    def doublec(self, j: int) -> bool:
        if j < 1 or self.b[j] != self.b[j - 1]:
            return False
        return self.cons(j)

    def cvc(self, i: int) -> bool:
        if i < 2 or not self.cons(i) or self.cons(i - 1) or not self.cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def ends(self, s: str) -> bool:
        length = len(s)
        if length > self.k + 1:
            return False
        if self.b[self.k - length + 1 : self.k + 1] != list(s):
            return False
        self.j = self.k - length
        return True

    def setto(self, s: str) -> None:
        self.b[self.j + 1 : self.k + 1] = list(s)
        self.k = self.j + len(s)

    def r(self, s: str) -> None:
        if self.m() > 0:
            self.setto(s)


def _step1ab(w: _Buffer) -> None:
    if w.b[w.k] == "s":
        if w.ends("sses"):
            w.k -= 2
        elif w.ends("ies"):
            w.setto("i")
        elif w.b[w.k - 1] != "s":
            w.k -= 1
    if w.ends("eed"):
        if w.m() > 0:
            w.k -= 1
    elif (w.ends("ed") or w.ends("ing")) and w.vowel_in_stem():
        w.k = w.j
        if w.ends("at"):
            w.setto("ate")
        elif w.ends("bl"):
            w.setto("ble")
        elif w.ends("iz"):
            w.setto("ize")
        elif w.doublec(w.k):
            w.k -= 1
            if w.b[w.k] in "lsz":
                w.k += 1
        elif w.m() == 1 and w.cvc(w.k):
            w.setto("e")


def _step1c(w: _Buffer) -> None:
    if w.ends("y") and w.vowel_in_stem():
        w.b[w.k] = "i"


_STEP2_RULES = {
    "a": (("ational", "ate"), ("tional", "tion")),
    "c": (("enci", "ence"), ("anci", "ance")),
    "e": (("izer", "ize"),),
    "l": (("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"),
          ("ousli", "ous")),
    "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
    "s": (("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
          ("ousness", "ous")),
    "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
    "g": (("logi", "log"),),
}

_STEP3_RULES = {
    "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
    "i": (("iciti", "ic"),),
    "l": (("ical", "ic"), ("ful", "")),
    "s": (("ness", ""),),
}


def _step2(w: _Buffer) -> None:
    for suffix, repl in _STEP2_RULES.get(w.b[w.k - 1], ()):
        if w.ends(suffix):
            w.r(repl)
            return


def _step3(w: _Buffer) -> None:
    for suffix, repl in _STEP3_RULES.get(w.b[w.k], ()):
        if w.ends(suffix):
            w.r(repl)
            return


_STEP4_SUFFIXES = {
    "a": ("al",),
    "c": ("ance", "ence"),
    "e": ("er",),
    "i": ("ic",),
    "l": ("able", "ible"),
    "n": ("ant", "ement", "ment", "ent"),
    "o": ("ion", "ou"),
    "s": ("ism",),
    "t": ("ate", "iti"),
    "u": ("ous",),
    "v": ("ive",),
    "z": ("ize",),
}


def _step4(w: _Buffer) -> None:
    for suffix in _STEP4_SUFFIXES.get(w.b[w.k - 1], ()):
        if w.ends(suffix):
            if suffix == "ion" and not (w.j >= 0 and w.b[w.j] in "st"):
                continue
            if w.m() > 1:
                w.k = w.j
            return


def _step5(w: _Buffer) -> None:
    w.j = w.k
    if w.b[w.k] == "e":
        a = w.m()
        if a > 1 or (a == 1 and not w.cvc(w.k - 1)):
            w.k -= 1
    if w.b[w.k] == "l" and w.doublec(w.k) and w.m() > 1:
        w.k -= 1


def porter_stem(token: str) -> str:
    """Stem a single lowercase token.

    Tokens that are not pure ASCII letters, or are shorter than 3
    characters, are returned unchanged.
    """
    if len(token) <= 2:
        return token
    if not (token.isascii() and token.isalpha()):
        return token
    w = _Buffer(token)
    _step1ab(w)
    _step1c(w)
    _step2(w)
    _step3(w)
    _step4(w)
    _step5(w)
    return "".join(w.b[: w.k + 1])
