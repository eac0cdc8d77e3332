"""Compare the checkers against the bounded oracles.

First a literal enumeration of every agent tree of depth 3 on one random
instance, then a batch of random instances through the word oracle.
Usage: python3 oracle_crosscheck.py [count] [seed]
"""
import random
import sys
import time

from rescheck import checkers, ltlf, oracle

count = int(sys.argv[1]) if len(sys.argv) > 1 else 200
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

rng = random.Random(seed)
goal = oracle.random_formula(rng, oracle.ATOMS_1_1)
env = oracle.random_env(rng, oracle.ATOMS_1_1)
print(f"goal {ltlf.render(goal)}   env {ltlf.render(env)}")
space = oracle.BoundedStrategySpace(oracle.ATOMS_1_1, 3)
bf = oracle.BruteForce(space, goal, env)
print(f"{space.agent_tree_count()} agent trees, {len(bf.envs)} valid environment trees")
mismatch = 0
for table in space.agent_tables():
    a = space.tree_to_transducer(table)
    lib = tuple(checkers.CHECKS[k](goal, env, a).decision for k in ("win", "dom", "be"))
    ref = (bf.win(a), bf.dom(a), bf.be(a))
    mismatch += lib != ref
print(f"win/dom/be mismatches against enumeration: {mismatch}")

t0 = time.perf_counter()
records = oracle.equivalence_suite(count, seed)
bad = [r for r in records if r["disagreements"]]
table_diff = sum(not r["tableAgrees"] for r in records)
print(f"\n{count} random instances in {time.perf_counter() - t0:.1f}s: "
      f"{len(bad)} with disagreements")
print(f"IPRAttr: best-effort reduction differs from the definition on "
      f"{table_diff} instances ({100 * table_diff / count:.1f}%)")
for r in records:
    if not r["tableAgrees"]:
        print(f"  e.g. goal {r['goal']}   env {r['env']}")
        break
