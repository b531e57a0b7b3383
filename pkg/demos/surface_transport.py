"""Surface holonomy: the transport theorem and reparametrization invariance.

The transported path of paths c(s) is compared with a_0(s) g(1, s) tau(h_0(s)),
each factor coming from its own ODE. Then a fake-flat configuration is
reparametrized, first with the flatting B and then with a perturbed B.
"""
from surfhol.scenario import RUNNERS, load_scenario_text, parse_scenario

for n in (50, 100, 200):
    sc = parse_scenario(load_scenario_text("su2-poly"), n_override=n)
    print(f"su2-poly N={n:3d}  transport theorem residual {RUNNERS['tgb'](sc)['tgb']:.3e}")

for name in ("su2-fakeflat-i", "su2-fakeflat-ii", "constant-path"):
    sc = parse_scenario(load_scenario_text(name))
    rep = RUNNERS["reparam"](sc)
    print(f"{name:16s} mode {sc.reparam.mode}  h0(1) change {rep['max']:.2e}")

text = load_scenario_text("su2-fakeflat-ii")
text = text.replace('[fields.B]\nfamily = "flatting"',
                    '[fields.B]\nfamily = "flatting-perturbed"\noffset = [0.1, 0.0, 0.0]')
text = text.replace('mode = "ii"', 'mode = "ii"\nenforce_conditions = false')
rep = RUNNERS["reparam"](parse_scenario(text))
print(f"perturbed B       fake curvature {rep['fake_curvature']:.2e}  h0(1) change {rep['max']:.2e}")
