"""Walk through the plant-watering corpus.

Prints every strategy property and responsibility verdict for the three
two-step strategies, the witnesses the checkers return, and the two
readings of inexcusable attribution on the bundled history.
"""
from rescheck import checkers, ltlf, problem, strategies
from rescheck import responsibility as resp

prob = problem.plant()
F = prob.formula
E1 = F("E1")
names = ("sigma1", "sigma2", "sigma3")
sigma = {n: prob.strategy(n) for n in names}


def show(label, verdict):
    print(f"  {label:<28} {str(verdict.decision).lower()}")
    w = getattr(verdict, "witness", None)
    if w and not verdict.decision:
        for key, val in w.items():
            print(f"      {key}: {val}")


print("atoms: agent", prob.partition.agent, "env", prob.partition.env)
for n in ("phi1", "phi2", "phi3"):
    print(f"{n} = {ltlf.render(F(n))}")

for goal in ("phi1", "phi2", "phi3"):
    print(f"\ngoal {goal}")
    for n in names:
        a = sigma[n]
        for kind in ("win", "dom", "be"):
            show(f"{kind}({goal}, {n})", checkers.CHECKS[kind](F(goal), E1, a))

print("\nresponsibility")
for n in names:
    a = sigma[n]
    show(f"ARA(phi1, {n})", resp.ara(F("phi1"), E1, a))
    show(f"PRAnt(!phi2, {n})", resp.pr_ant(F("!phi2"), E1, a))
    show(f"IPRAnt(!phi2, {n})", resp.ipr_ant(F("!phi2"), E1, a))

rain = prob.env_strategy("rain_evening_only")
print("\nplay of sigma2 against rain-evening-only:",
      [sorted(s) for s in strategies.play(sigma["sigma2"], rain)])
rep = resp.pr_attr_vs_env(F("!phi2"), E1, sigma["sigma2"], rain)
print("  PRAttrVsEnv(!phi2, sigma2):", rep.decision,
      "alternative", rep.verdicts[0].witness.get("alternative"))

h = prob.history("sigma2_vs_rain_evening")
print("\nhistory h =", [(sorted(y), sorted(x)) for y, x in h])
print("  PRAttr(!phi2, sigma2, h): ", resp.pr_attr(F("!phi2"), E1, sigma["sigma2"], h).decision)
ipr = resp.ipr_attr(F("!phi2"), E1, sigma["sigma2"], h)
print("  IPRAttr(!phi2, sigma2, h):", ipr.decision)
print("     definition (dominance over all E-environments):", ipr.diagnostics["definition"])
print("     best-effort check under E and E_h:             ", ipr.diagnostics["table"])
