"""Standalone matplotlib scripts emitted next to each dataset.

The core library has no plotting dependency; each experiment writes one
of these scripts (with the CSV filename substituted) so a figure is one
``python <script>`` away for anyone with matplotlib installed.
"""

_READER = '''\
import csv, json, sys
import numpy as np

PATH = "{csv_name}"

def load(path):
    with open(path) as fh:
        first = fh.readline()
        header = json.loads(first[2:]) if first.startswith("# ") else {{}}
        reader = csv.reader(fh)
        columns = next(reader)
        rows = list(reader)
    def parse(vals):
        try:
            return np.array([float(v) for v in vals])
        except ValueError:
            return np.array([complex(v.strip("()")) for v in vals])
    data = {{c: parse([r[j] for r in rows]) for j, c in enumerate(columns)}}
    return header, data

header, data = load(PATH)
'''

DYNAMICS_PLOT = _READER + '''
import matplotlib.pyplot as plt

fig, ax = plt.subplots(figsize=(7, 4.5))
t = data["time"].real
ax.plot(t, data["p_plus_full"].real, "-", color="tab:blue", label="even cat, master equation")
ax.plot(t, data["p_minus_full"].real, "-", color="tab:red", label="odd cat, master equation")
ax.plot(t, data["p_plus_eff"].real, "--", color="tab:cyan", label="even cat, effective model")
ax.plot(t, data["p_minus_eff"].real, "--", color="tab:orange", label="odd cat, effective model")
ax.set_xlabel("time (1/K)")
ax.set_ylabel("population")
ax.set_title("cat-state populations: full vs effective dynamics")
ax.legend(frameon=False)
fig.tight_layout()
fig.savefig(PATH.replace(".csv", ".png"), dpi=200)
print("wrote", PATH.replace(".csv", ".png"))
'''

DISCREPANCY_PLOT = _READER + '''
import matplotlib.pyplot as plt

alphas = np.unique(data["alpha"].real)
times = np.unique(data["time"].real)
grid = data["discrepancy"].real.reshape(len(alphas), len(times))

fig, ax = plt.subplots(figsize=(7, 4.5))
mesh = ax.pcolormesh(times, alphas, grid, shading="nearest", cmap="magma")
fig.colorbar(mesh, ax=ax, label="|p+ full - p+ effective|")
ax.set_xlabel("time (1/K)")
ax.set_ylabel("cat size alpha")
ax.set_title("effective-model discrepancy map")
fig.tight_layout()
fig.savefig(PATH.replace(".csv", ".png"), dpi=200)
print("wrote", PATH.replace(".csv", ".png"))
'''

PT_TRANSITION_PLOT = _READER + '''
import matplotlib.pyplot as plt

alpha = data["alpha"].real
fig, axes = plt.subplots(3, 1, figsize=(6.5, 9), sharex=True)
axes[0].plot(alpha, data["gamma"].real, "r-", label="gamma (gain/loss)")
axes[0].plot(alpha, data["epsilon"].real, "b-", label="epsilon (coupling)")
star = header.get("provenance", {{}}).get("ep_alpha")
if star is not None:
    for ax in axes:
        ax.axvline(star, color="gray", ls=":", lw=1)
axes[0].set_ylabel("rate (K)")
axes[0].legend(frameon=False)
axes[1].plot(alpha, data["re_e_plus"].real, "b-", label="Re E+")
axes[1].plot(alpha, data["re_e_minus"].real, "r--", label="Re E-")
axes[1].set_ylabel("Re E (K)")
axes[1].legend(frameon=False)
axes[2].plot(alpha, data["im_e_plus"].real, "b-", label="Im E+")
axes[2].plot(alpha, data["im_e_minus"].real, "r--", label="Im E-")
axes[2].set_ylabel("Im E (K)")
axes[2].set_xlabel("cat size alpha")
axes[2].legend(frameon=False)
axes[0].set_title("PT-symmetry breaking across the exceptional point")
fig.tight_layout()
fig.savefig(PATH.replace(".csv", ".png"), dpi=200)
print("wrote", PATH.replace(".csv", ".png"))
'''

ENTANGLEMENT_PLOT = _READER + '''
import matplotlib.pyplot as plt

beta = data["beta"].real
fig, axes = plt.subplots(3, 1, figsize=(6.5, 9), sharex=True)
styles = {{"f+": ("r-",), "f-": ("b--",), "s+": ("g-",), "s-": ("m--",)}}
for key, (st,) in styles.items():
    col = key.replace("+", "_plus").replace("-", "_minus")
    axes[0].plot(beta, data["c_" + col].real, st, label="C " + key)
    axes[1].plot(beta, data["dc_dbeta_" + col].real, st, label="dC/dbeta " + key)
    axes[2].plot(beta, data["re_e_" + col].real, st, label="Re E " + key)
    axes[2].plot(beta, data["im_e_" + col].real, st, alpha=0.4, label="Im E " + key)
prov = header.get("provenance", {{}})
for ep_key in ("ep_beta_f", "ep_beta_s"):
    if prov.get(ep_key) is not None:
        for ax in axes:
            ax.axvline(prov[ep_key], color="gray", ls=":", lw=1)
axes[0].set_ylabel("concurrence")
axes[0].legend(frameon=False, ncol=2, fontsize=8)
axes[1].set_ylabel("dC/dbeta")
axes[1].legend(frameon=False, ncol=2, fontsize=8)
axes[2].set_ylabel("eigenvalues (K)")
axes[2].set_xlabel("second cat size beta")
axes[2].legend(frameon=False, ncol=2, fontsize=7)
axes[0].set_title("entanglement transition at the sector exceptional points")
fig.tight_layout()
fig.savefig(PATH.replace(".csv", ".png"), dpi=200)
print("wrote", PATH.replace(".csv", ".png"))
'''


def render(template: str, csv_name: str) -> str:
    return template.format(csv_name=csv_name)
