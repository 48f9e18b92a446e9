"""Bengali root phones and their similar-phone groups.

A library is an ordered list of groups. The first member of each group is
its root phone, and the group's position (1-based) is the root index that
the phonetic encoder emits. Index 35 is reserved for n-grams that match no
group; 32-34 are never emitted.
"""

from dataclasses import dataclass, field
import re

from .errors import LibraryParseError, LibraryValidationError

N_ROOTS = 31
OOV_INDEX = 35
MAX_PHONE_LEN = 3

_PHONE_RE = re.compile(r"^[a-z]{1,3}$")

# Groups in root order; root index = position + 1.
_DEFAULT_GROUPS = (
    ("aa", "a"),
    ("i", "ee"),
    ("u", "w"),
    ("r", "ri"),
    ("e",),
    ("ai", "oi"),
    ("o", "oo"),
    ("au", "ou", "ow"),
    ("ka", "k"),
    ("kha", "kh"),
    ("ga", "g"),
    ("gha", "gh"),
    ("ca", "c"),
    ("cha", "ch"),
    ("ja", "j", "z"),
    ("jha", "jh"),
    ("ta", "t"),
    ("tha", "th"),
    ("da", "d"),
    ("dha", "dh"),
    ("na", "n"),
    ("pa", "p"),
    ("pha", "ph", "f"),
    ("ba", "b"),
    ("bha", "bh", "v"),
    ("ma", "m"),
    ("ya", "y"),
    ("ra", "rh"),
    ("la", "l"),
    ("sa", "s", "sh"),
    ("ha", "h"),
)


@dataclass(frozen=True)
class PhoneGroup:
    members: tuple

    @property
    def root(self):
        return self.members[0] if self.members else None


@dataclass(frozen=True)
class PhoneticLibrary:
    roots: tuple
    groups: tuple
    oov_index: int = OOV_INDEX
    _table: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))
        object.__setattr__(self, "groups", tuple(
            g if isinstance(g, PhoneGroup) else PhoneGroup(tuple(g)) for g in self.groups))
        position = {r: i + 1 for i, r in reversed(list(enumerate(self.roots)))}
        table = {}
        for g in self.groups:
            idx = position.get(g.root)
            if idx is None:
                continue
            for m in g.members:
                table.setdefault(m, idx)
        object.__setattr__(self, "_table", table)

    def lookup(self, gram):
        return self._table.get(gram)

    def members(self):
        return [m for g in self.groups for m in g.members]

    def root_for_index(self, index):
        if index == self.oov_index:
            return "OOV"
        return self.roots[index - 1]


def default_library():
    return PhoneticLibrary(
        roots=tuple(g[0] for g in _DEFAULT_GROUPS),
        groups=tuple(PhoneGroup(g) for g in _DEFAULT_GROUPS),
    )


def lookup(lib, gram):
    """Root index (1-based) of the group containing ``gram``, or None."""
    return lib.lookup(gram)


def validate_library(lib):
    """Return a list of violated invariants; empty means the library is valid."""
    problems = []
    if len(lib.roots) != N_ROOTS:
        problems.append(f"root count {len(lib.roots)} != {N_ROOTS}")
    if len(set(lib.roots)) != len(lib.roots):
        problems.append("duplicate root phones")
    if lib.oov_index != OOV_INDEX:
        problems.append(f"oov index {lib.oov_index} != {OOV_INDEX}")

    roots = set(lib.roots)
    owner = {}
    root_groups = {}
    for gi, g in enumerate(lib.groups):
        if not g.members:
            problems.append(f"group {gi + 1} is empty")
            continue
        for m in g.members:
            if not isinstance(m, str) or not _PHONE_RE.match(m):
                problems.append(f"group {gi + 1}: bad phone {m!r} (need 1-3 letters a-z)")
            if m in owner and owner[m] != gi:
                problems.append(f"phone {m!r} is a member of groups {owner[m] + 1} and {gi + 1}")
            owner.setdefault(m, gi)
        if g.root not in roots:
            problems.append(f"group {gi + 1}: first member {g.root!r} is not a root phone")
        else:
            root_groups.setdefault(g.root, []).append(gi)

    for r in lib.roots:
        n = len(root_groups.get(r, ()))
        if n != 1:
            problems.append(f"root {r!r} leads {n} groups (need exactly 1)")
    return problems


def load_library(source):
    """Parse a library from text or a file object.

    One group per line, members separated by commas, root first. Blank
    lines and lines starting with ``#`` are ignored. Line order fixes the
    root indices unless an ``@roots a,b,...`` line lists them explicitly.
    """
    text = source if isinstance(source, str) else source.read()
    groups = []
    roots = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@roots"):
            if roots is not None:
                raise LibraryParseError(lineno, "duplicate @roots line")
            roots = tuple(m.strip() for m in line[len("@roots"):].split(","))
            for m in roots:
                if not _PHONE_RE.match(m):
                    raise LibraryParseError(lineno, f"bad root phone {m!r}")
            continue
        members = [m.strip() for m in line.split(",")]
        for m in members:
            if not _PHONE_RE.match(m):
                raise LibraryParseError(lineno, f"bad phone {m!r} (need 1-3 letters a-z)")
        groups.append(tuple(members))
    if roots is None:
        roots = tuple(g[0] for g in groups)
    lib = PhoneticLibrary(roots=roots, groups=tuple(groups))
    problems = validate_library(lib)
    if problems:
        raise LibraryValidationError(problems)
    return lib


def load_library_file(path):
    with open(path, encoding="utf-8") as fh:
        return load_library(fh)


def dump_library(lib):
    lines = ["# root phone first; line order defines root indices 1..31"]
    if tuple(g.root for g in lib.groups) != lib.roots:
        lines.append("@roots " + ",".join(lib.roots))
    lines += [",".join(g.members) for g in lib.groups]
    return "\n".join(lines) + "\n"
