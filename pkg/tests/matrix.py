"""The command × input matrix with its expected exit codes."""

from bvtt import gallery
from bvtt.textformat import dumps

STRUCTURE_COMMANDS = ("verify", "ddlemma", "degeneration", "quasiabelian")

# verify, ddlemma, degeneration, quasiabelian
EXPECTED = {
    "heisenberg": (0, 1, 1, 1),
    "heisenberg_hierarchy": (0, 2, 2, 2),
    "square_bicomplex": (0, 0, 0, 0),
    "delta_only": (0, 1, 1, 1),
    "abelian_torus": (0, 0, 0, 0),
    "jacobi_example": (0, 2, 2, 2),
    "poisson_nilmanifold": (0, 1, 0, 1),
    "obstructed_dglie": (0, 2, 2, 2),
    "hermitian_demo": (2, 2, 2, 2),
    # corrupted variants: a failing construction is a failed property for
    # verify and a precondition error for everything else
    "square_bicomplex:commutator": (1, 2, 2, 2),
    "jacobi_example:eta": (1, 2, 2, 2),
    "broken_differential": (1, 2, 2, 2),
    "heisenberg:garbage": (2, 2, 2, 2),
    "heisenberg:binding": (2, 2, 2, 2),
}

BROKEN_DIFFERENTIAL = """field Q
generator a degree 1
generator b degree 2 nilpotent 2
generator c degree 3
cap 3
d a = b
d b = c
operator D degree -1 { b -> a }
structure bv delta=D
"""


def document_text(key):
    if key == "broken_differential":
        return BROKEN_DIFFERENTIAL
    name, _, corruption = key.partition(":")
    text = dumps(gallery.get(name).document())
    if corruption == "commutator":
        text = text.replace("b -> -e", "b -> e")
    elif corruption == "eta":
        text = text.replace("eta arity 1 = d/de3", "eta arity 1 = d/de1")
    elif corruption == "garbage":
        text += "frobnicate 3\n"
    elif corruption == "binding":
        text = text.replace("structure bv pi=pi", "structure bv pi=rho")
    assert corruption == "" or text != dumps(gallery.get(name).document())
    return text


# (input key, argv tail, expected exit code)
EXTRA = [
    ("abelian_torus", ["deform", "--class", "1,0,0", "--order", "8", "--method", "tt"], 0),
    ("poisson_nilmanifold", ["deform", "--class", "1,0,0,0", "--order", "8"], 0),
    ("poisson_nilmanifold", ["deform", "--class", "0,1,0,0", "--order", "8", "--method", "homotopy"], 0),
    ("heisenberg", ["deform", "--class", "1,0", "--order", "3", "--method", "tt"], 2),
    ("obstructed_dglie", ["deform", "--class", "1,0,0,0,1,0", "--order", "3"], 1),
    ("obstructed_dglie", ["deform", "--class", "1,0", "--order", "3"], 2),
    ("obstructed_dglie", ["deform", "--class", "1,x", "--order", "3"], 2),
    ("poisson_nilmanifold", ["charp", "--p", "5"], 0),
    ("square_bicomplex", ["charp", "--p", "7"], 0),
    ("poisson_nilmanifold", ["charp", "--p", "3"], 2),
    ("poisson_nilmanifold", ["charp", "--p", "9"], 2),
    ("hermitian_demo", ["charp", "--p", "5"], 2),
    ("obstructed_dglie", ["charp", "--p", "5"], 0),
    ("obstructed_dglie", ["charp", "--p", "5", "--class", "1,0,0,0,1,0"], 1),
    ("obstructed_dglie", ["charp", "--p", "7", "--class", "1,0"], 2),
    ("heisenberg", ["transfer", "--arity", "4"], 0),
    ("obstructed_dglie", ["transfer", "--arity", "3"], 0),
    ("heisenberg", ["transfer", "--arity", "5"], 2),
    ("heisenberg_hierarchy", ["transfer", "--arity", "2"], 2),
    ("heisenberg:garbage", ["transfer", "--arity", "2"], 2),
]
