"""Writing a model by hand, with observation classes, and checking it."""
from boundedatl import SemanticsSpec, UnsupportedSemantics, evaluate
from boundedatl.strategy import format_dfst
from boundedatl.model import parse_model, serialize_model, validate

text = """\
cgm
players 2
actions a b
state s0
state seenL
state seenR
state midL
state midR
state goal props p
state trap
legal s0 1 a b
legal s0 2 a b
legal seenL 1 a b
legal seenL 2 a b
legal seenR 1 a b
legal seenR 2 a b
legal midL 1 a b
legal midL 2 a b
legal midR 1 a b
legal midR 2 a b
legal goal 1 a b
legal goal 2 a b
legal trap 1 a b
legal trap 2 a b
trans s0 (a,a) seenL
trans s0 (a,b) seenR
trans s0 (b,a) seenL
trans s0 (b,b) seenR
trans seenL (a,a) midL
trans seenL (a,b) midL
trans seenL (b,a) midL
trans seenL (b,b) midL
trans seenR (a,a) midR
trans seenR (a,b) midR
trans seenR (b,a) midR
trans seenR (b,b) midR
trans midL (a,a) goal
trans midL (a,b) goal
trans midL (b,a) trap
trans midL (b,b) trap
trans midR (a,a) trap
trans midR (a,b) trap
trans midR (b,a) goal
trans midR (b,b) goal
trans goal (a,a) goal
trans goal (a,b) goal
trans goal (b,a) goal
trans goal (b,b) goal
trans trap (a,a) trap
trans trap (a,b) trap
trans trap (b,a) trap
trans trap (b,b) trap
obs 1 { s0 } { seenL } { seenR } { midL midR } { goal trap }
"""
m = parse_model(text)
print(validate(m))  # [] means well formed

# player 2 picks a side, player 1 sees it once and then has to remember it
for k in (1, 2):
    v = evaluate(m, "<<1>> F p", SemanticsSpec("Fk", k=k), ["s0"])["s0"]
    print(k, v.status, v.examined)
print(format_dfst(v.witness[1]))

# deepening search with a cap: stops at the first memory size that works
print(evaluate(m, "<<1>> F p", SemanticsSpec("F", cap=3), ["s0"])["s0"])

# perfect recall with incomplete information is refused, as is uncapped deepening
for sem in (SemanticsSpec("R"), SemanticsSpec("F")):
    try:
        evaluate(m, "<<1>> F p", sem)
    except UnsupportedSemantics as e:
        print("refused:", e)

print(serialize_model(m))
