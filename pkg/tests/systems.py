"""Small systems shared by the engine and checker tests."""

from cspsym.graph import Network
from cspsym.lang import instantiate, parse_program

REFERENCE_TRACE = [
    ("P0", "assign false to recd"),
    ("P1", "assign false to recd"),
    ("P1", "assign false to sent"),
    ("P0", "assign false to sent"),
    ("P1", "evaluate Boolean guards"),
    ("P0", "evaluate Boolean guards"),
    ("P0,P1", "send P0 from P0 to P1's variable x"),
    ("P0", "assign true to sent"),
    ("P0", "evaluate Boolean guards"),
    ("P1", "assign true to recd"),
    ("P1", "evaluate Boolean guards"),
    ("P0,P1", "send P1 from P1 to P0's variable x"),
    ("P1", "assign true to sent"),
    ("P0", "assign true to recd"),
    ("P0", "evaluate Boolean guards and exit repetition"),
    ("P1", "evaluate Boolean guards and exit repetition"),
]


def single(text: str, name: str = "a"):
    net = Network([name])
    return instantiate(net, {name: (parse_program(text), {})})


def pair(text_a: str, text_b: str, edges=(("a", "b"), ("b", "a"))):
    net = Network(["a", "b"], edges)
    return instantiate(net, {"a": (parse_program(text_a), {}), "b": (parse_program(text_b), {})})


def uniform(net: Network, text: str, binding_of):
    prog = parse_program(text)
    return instantiate(net, {v: (prog, binding_of(v)) for v in net.vertices})
