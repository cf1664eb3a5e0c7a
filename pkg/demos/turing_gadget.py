"""A Turing machine run played out by two blind players."""
from boundedatl import SemanticsSpec, evaluate
from boundedatl.strategy import apply_strategy
from boundedatl.turing import config_word, gadget_classes, tm_parse, tm_run, tm_to_icgm

acceptor = tm_parse("""tm
states q0 qa
initial q0
accept qa
alphabet 0
blank B
delta q0 B -> qa 0 R
""")
for c in tm_run(acceptor, 4):
    print(" ".join(config_word(c)))  # q0, then 0 qa forever

m = tm_to_icgm(acceptor)
print(len(m.states), "states,", m.n_players, "players")

# players 1 and 2 avoid the sink iff they can spell out the run, configuration by configuration
v = evaluate(m, "<<1,2>> G !p", SemanticsSpec("F", cap=3), ["s0"])["s0"]
print(v.status, "memory", v.memory)

# replay player 1's witness: after seeing I at round r it writes configuration r
cls = gadget_classes(m, 1)
for r in range(1, 4):
    obs = [cls["0"]] + [cls["."]] * (r - 1) + [cls["I"]]
    out = [apply_strategy(v.witness[1], obs)]
    for _ in range(3):
        obs.append(cls["."])
        out.append(apply_strategy(v.witness[1], obs))
    print(r, out)

# a machine that writes 0 forever never repeats a configuration: no cap is enough
zero = tm_to_icgm(tm_parse("""tm
states q0
initial q0
accept
alphabet 0
blank B
delta q0 B -> q0 0 R
"""))
print(evaluate(zero, "<<1,2>> G !p", SemanticsSpec("F", cap=2), ["s0"])["s0"])
