"""Where the semantics agree and where they part ways."""
from boundedatl import SemanticsSpec, check_atl_fixpoint_complete, evaluate, fig1_model, fig3_family

m = fig1_model()
print(m.states, m.n_players)

# complete information, plain ATL: the fixpoint answer is already reached with memory 1
for f in ["<<1>> X p", "<<1,2>> X p", "<<>> G q", "<<1,2>> F p"]:
    fix = check_atl_fixpoint_complete(m, f)
    mem1 = {s for s, v in evaluate(m, f, SemanticsSpec("Fk", k=1)).items() if v.holds}
    print(f"{f:<14} fixpoint={sorted(fix)} memory1={sorted(mem1)}")

# memoryless (r) and one-state memory (F1) are the same thing
for f in ["<<1>> X p", "<<2>> G q", "!<<1>> F p"]:
    r = {s: v.status for s, v in evaluate(m, f, SemanticsSpec("r")).items()}
    f1 = {s: v.status for s, v in evaluate(m, f, SemanticsSpec("Fk", k=1)).items()}
    print(f, r == f1)

# more memory never hurts: Holds at k stays Holds at k+1
chain = fig3_family(3)
for k in (1, 2, 3):
    print(k, evaluate(chain, "<<1>> F p", SemanticsSpec("Fk", k=k), ["s0"])["s0"].status)

# nested formulas: an inner Unknown is bracketed, so some contexts still decide
print(evaluate(chain, "<<1>> F p | true", SemanticsSpec("F", cap=1), ["s0"])["s0"].status)
print(evaluate(chain, "<<1>> F p", SemanticsSpec("F", cap=1), ["s0"])["s0"])
