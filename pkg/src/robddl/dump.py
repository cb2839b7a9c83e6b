"""Text dump and DOT export of diagrams.

Dump format, one node per line, children before parents; a node's reference
is its 1-based line number::

    F
    T <lit>*
    D <var> <loRef> <hiRef> <lit>*
    root <ref>
"""
from __future__ import annotations

from robddl.core import FALSE, TRUE_VAR, Store


class DumpError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def dumps(store: Store, root: int) -> str:
    index: dict[int, int] = {}
    lines = []
    for ref in store.reachable(root):
        index[ref] = len(lines) + 1
        if ref == FALSE:
            lines.append("F")
            continue
        lits = " ".join(map(str, store.lits[ref].ordered))
        if store.var[ref] == TRUE_VAR:
            lines.append(f"T {lits}".rstrip())
        else:
            lo, hi = index[store.lo[ref]], index[store.hi[ref]]
            lines.append(f"D {store.var[ref]} {lo} {hi} {lits}".rstrip())
    lines.append(f"root {index[root]}")
    return "\n".join(lines) + "\n"


def loads(text: str, store: Store | None = None) -> tuple[Store, int]:
    """Rebuild a dumped diagram in ``store`` (a new one by default)."""
    store = store if store is not None else Store()
    refs: list[int] = []
    root = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        if root is not None:
            raise DumpError("content after root line", lineno)
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise DumpError(f"bad number in {raw!r}", lineno) from None
        tag = parts[0]

        def ref(k: int) -> int:
            if not 1 <= k <= len(refs):
                raise DumpError(f"reference {k} is not an earlier line", lineno)
            return refs[k - 1]

        try:
            if tag == "F" and not nums:
                refs.append(FALSE)
            elif tag == "T":
                refs.append(store.true(nums))
            elif tag == "D" and len(nums) >= 3:
                refs.append(store.decision(nums[0], ref(nums[1]), ref(nums[2]), nums[3:]))
            elif tag == "root" and len(nums) == 1:
                root = ref(nums[0])
            else:
                raise DumpError(f"unrecognised line {raw!r}", lineno)
        except DumpError:
            raise
        except Exception as e:  # malformed node content
            raise DumpError(str(e), lineno) from None
    if root is None:
        raise DumpError("missing root line", len(text.splitlines()))
    return store, root


def to_dot(store: Store, root: int) -> str:
    out = ["digraph bdd {"]
    for ref in store.reachable(root):
        if ref == FALSE:
            out.append(f'  n{ref} [shape=box,label="F"];')
            continue
        lits = ",".join(map(str, store.lits[ref].ordered))
        if store.var[ref] == TRUE_VAR:
            out.append(f'  n{ref} [shape=box,label="T {{{lits}}}"];')
        else:
            label = f"x{store.var[ref]}" + (f"\\n{{{lits}}}" if lits else "")
            out.append(f'  n{ref} [shape=ellipse,label="{label}"];')
            out.append(f"  n{ref} -> n{store.lo[ref]} [style=dashed];")
            out.append(f"  n{ref} -> n{store.hi[ref]};")
    out.append("}")
    return "\n".join(out) + "\n"
