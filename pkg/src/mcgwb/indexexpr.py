"""Tiny integer expressions such as ``2i+1`` or ``g-1`` used in data files."""
import ast
import operator
import re

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.FloorDiv: operator.floordiv, ast.Mod: operator.mod}


def _normalize(text: str) -> str:
    # 2i -> 2*i, 2(g-1) -> 2*(g-1)
    return re.sub(r"(\d)\s*([A-Za-z_(])", r"\1*\2", text.replace("/", "//"))


def evaluate(text: str, env: dict) -> int:
    tree = ast.parse(_normalize(text.strip()), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise KeyError(node.id)
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise ValueError(f"unsupported index expression {text!r}")
    return ev(tree)


_BRACE = re.compile(r"\{([^{}]*)\}")


def expand(template: str, env: dict, wrap: int = 0) -> str:
    """Replace each ``{expr}`` by its value, reduced into 1..wrap if wrap."""
    def sub(m):
        v = evaluate(m.group(1), env)
        if wrap:
            v = (v - 1) % wrap + 1
        return str(v)
    return _BRACE.sub(sub, template)
