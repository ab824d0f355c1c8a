"""Generate a small scenario corpus on disk.

Writes one JSON scenario per archetype into demos/out/scenes, each with a
feasible recorded future, so the other demos and the CLI have files to chew
on. Everything is seeded; rerunning produces identical bytes.
"""
from pathlib import Path

from lanebound import make_corpus
from lanebound.io import save_scenario

OUT = Path(__file__).parent / "out" / "scenes"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    corpus = make_corpus(5, seed=7, with_ground_truth=True)
    for scenario in corpus:
        path = OUT / f"{scenario.scenario_id}.json"
        save_scenario(scenario, path)
        lanes = len(list(scenario.graph.lanes()))
        print(f"{path.name}: {lanes} lanes, "
              f"{len(scenario.focal_history)} history states, "
              f"{len(scenario.ground_truth_future)} future states")
    print(f"\nwrote {len(corpus)} scenarios to {OUT}")
    print("try: lanebound extract", OUT / f"{corpus[0].scenario_id}.json")


if __name__ == "__main__":
    main()
