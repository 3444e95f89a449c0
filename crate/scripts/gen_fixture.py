"""Regenerates the bundled replay corpus under crates/cli/tests/data."""
import random
import sys
from pathlib import Path

out = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/cli/tests/data")
rng = random.Random(20240611)
n = 64
edges = {}
# a Hamiltonian cycle keeps the graph strongly connected; chords add shortcuts
for i in range(n):
    edges[(i, (i + 1) % n)] = rng.randint(1, 4)
while len(edges) < 4 * n:
    u, v = rng.randrange(n), rng.randrange(n)
    if u != v:
        edges.setdefault((u, v), rng.randint(1, 4))
name = lambda i: f"v{i}"
lines = [f"{n} {len(edges)} directed"] + [f"{name(u)} {name(v)} {w}" for (u, v), w in sorted(edges.items())]
(out / "corpus64.graph").write_text("\n".join(lines) + "\n")

chords = [e for e in edges if e[1] != (e[0] + 1) % n]
cmds = []
for i in range(100):
    r = rng.random()
    if r < 0.5:
        if rng.random() < 0.3:
            u, v = rng.choice(chords)
            cmds.append(f"U {name(u)} {name(v)} inf")
        else:
            u, v = rng.randrange(n), rng.randrange(n)
            if u == v:
                v = (u + 1) % n
            cmds.append(f"U {name(u)} {name(v)} {rng.randint(1, 4)}")
    elif r < 0.9:
        a = sorted(rng.sample(range(n), rng.randint(1, 4)))
        b = sorted(rng.sample(range(n), rng.randint(1, 4)))
        cmds.append("Q " + ",".join(map(name, a)) + ";" + ",".join(map(name, b)))
    else:
        cmds.append(f"S {name(rng.randrange(n))}")
(out / "corpus64.stream").write_text("\n".join(cmds) + "\n")

# undirected unit-weight companion for the undirected metric modes
n = 48
uedges = set()
for i in range(n):
    uedges.add((min(i, (i + 1) % n), max(i, (i + 1) % n)))
while len(uedges) < 2 * n:
    u, v = rng.randrange(n), rng.randrange(n)
    if u != v:
        uedges.add((min(u, v), max(u, v)))
lines = [f"{n} {len(uedges)} undirected"] + [f"{name(u)} {name(v)} 1" for u, v in sorted(uedges)]
(out / "ring48.graph").write_text("\n".join(lines) + "\n")
ucmds = []
for i in range(30):
    r = rng.random()
    if r < 0.4:
        u, v = rng.choice(sorted(uedges))
        ucmds.append(f"U {name(u)} {name(v)} {rng.choice(['1', '2', 'inf']) if v != (u + 1) % n else '1'}")
    elif r < 0.7:
        a = sorted(rng.sample(range(n), 3))
        b = sorted(rng.sample(range(n), 3))
        ucmds.append("Q " + ",".join(map(name, a)) + ";" + ",".join(map(name, b)))
    else:
        ucmds.append(rng.choice(["D", "R", "E", "C"]))
(out / "ring48.stream").write_text("\n".join(ucmds) + "\n")
