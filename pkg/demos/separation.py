"""Bounded memory matters: the wait-then-go chain and the observation chain."""
from boundedatl import SemanticsSpec, evaluate, fig2_model, fig3_family, separation_formula
from boundedatl.strategy import format_dfst

m = fig2_model()  # one player, actions w (wait) and g (go)
print(m.states, m.actions)

# <<1>> X^k p needs a counter: wait k-1 times, then go
for k in range(1, 5):
    f = separation_formula(k)
    row = []
    for mem in range(1, 5):
        v = evaluate(m, f, SemanticsSpec("Fk", k=mem), ["s0"])["s0"]
        row.append(v.status[0])  # H or F
    print(f"{f:<20} memory 1..4: {' '.join(row)}")

# the smallest witness is printed as a transducer table
v = evaluate(m, separation_formula(3), SemanticsSpec("Fk", k=3), ["s0"])["s0"]
print(format_dfst(v.witness[1]))

# incomplete information: player 1 cannot tell s1..sk apart, so it must count
for k in range(1, 4):
    chain = fig3_family(k)
    got = [evaluate(chain, "<<1>> F p", SemanticsSpec("Fk", k=mem), ["s0"])["s0"].status
           for mem in range(1, k + 1)]
    print(f"chain k={k}: {got}")  # Holds first appears at memory k
