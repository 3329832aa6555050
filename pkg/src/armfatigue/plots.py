"""Static SVG figures of a simulation result."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .fatigue import Phase  # noqa: E402

# fixed ids/metadata so repeated runs give identical files
matplotlib.rcParams["svg.hashsalt"] = "armfatigue"


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_capacity(result, path):
    """Capacity vs demand per joint, with the crossing marked."""
    t_min = result.t / 60.0
    fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    for ax, joint in zip(axes, ("shoulder", "elbow")):
        js = result.joints[joint]
        ax.plot(t_min, js.capacity, label="capacity (active group)")
        ax.plot(t_min, js.mvc, lw=0.8, ls="--", label="MVC")
        ax.plot(t_min, js.demand, label="|torque demand|")
        if js.crossing is not None:
            ax.axvline(js.crossing.minutes, color="k", lw=0.8)
            ax.annotate(f"{js.crossing.minutes:.2f} min", (js.crossing.minutes, js.crossing.demand),
                        xytext=(5, 10), textcoords="offset points")
        ax.set_ylabel(f"{joint} [N m]")
        ax.legend(loc="upper right", fontsize="small")
    axes[-1].set_xlabel("time [min]")
    _save(fig, path)


def plot_torques(result, path):
    """Torque along the stroke, one panel per phase."""
    x = result.scenario.path
    hand_x, _, _ = x.sample(result.t)
    fig, axes = plt.subplots(1, 2, figsize=(9, 4), sharey=True)
    one_cycle = result.t < result.scenario.schedule.cycle
    for ax, phase in zip(axes, (Phase.PUSH, Phase.PULL)):
        sel = one_cycle & (result.phase == phase.code)
        ax.plot(hand_x[sel], result.torques.tau_shoulder[sel], label="shoulder")
        ax.plot(hand_x[sel], result.torques.tau_elbow[sel], label="elbow")
        ax.set_title(f"{phase.value} phase")
        ax.set_xlabel("hand x [m]")
        ax.legend(fontsize="small")
    axes[0].set_ylabel("torque [N m]")
    _save(fig, path)


def write_plots(result, destination) -> list[Path]:
    dest = Path(destination)
    paths = [dest / "capacity.svg", dest / "torques.svg"]
    plot_capacity(result, paths[0])
    plot_torques(result, paths[1])
    return paths
