#!/usr/bin/env python3
"""Regenerates the reference worlds under worlds/.

Each world is a JSON file plus a wall grid (binary PGM and its side-car
metadata). Objects are polygons in metres; the simulator rasterises them on
top of the walls.
"""

import json
import pathlib

RES = 0.05


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


class Grid:
    def __init__(self, width_m, height_m):
        self.w = round(width_m / RES)
        self.h = round(height_m / RES)
        self.occ = [[False] * self.w for _ in range(self.h)]

    def wall(self, x0, y0, x1, y1):
        for r in range(self.h):
            cy = (r + 0.5) * RES
            if not y0 <= cy <= y1:
                continue
            for c in range(self.w):
                cx = (c + 0.5) * RES
                if x0 <= cx <= x1:
                    self.occ[r][c] = True

    def door(self, x0, y0, x1, y1):
        for r in range(self.h):
            cy = (r + 0.5) * RES
            if not y0 <= cy <= y1:
                continue
            for c in range(self.w):
                cx = (c + 0.5) * RES
                if x0 <= cx <= x1:
                    self.occ[r][c] = False

    def outline(self, t=0.1):
        W, H = self.w * RES, self.h * RES
        self.wall(0, 0, W, t)
        self.wall(0, H - t, W, H)
        self.wall(0, 0, t, H)
        self.wall(W - t, 0, W, H)

    def save(self, folder, name):
        pixels = bytearray()
        for r in reversed(range(self.h)):  # top row first
            pixels.extend(0 if v else 254 for v in self.occ[r])
        (folder / f"{name}.pgm").write_bytes(b"P5\n%d %d\n255\n" % (self.w, self.h) + bytes(pixels))
        (folder / f"{name}.yaml").write_text(
            f"image: {name}.pgm\nresolution: {RES}\norigin: 0 0\n")


def obj(id_, label, poly, height="floor"):
    return {"id": id_, "label": label, "height_class": height, "polygon": poly}


def house2br(root):
    g = Grid(10.0, 10.0)
    g.outline()
    # bedrooms (top) / hallway / living + kitchen (bottom)
    g.wall(0, 6.45, 10, 6.55)
    g.door(2.0, 6.4, 2.9, 6.6)
    g.door(7.0, 6.4, 7.9, 6.6)
    g.wall(4.95, 6.5, 5.05, 10)
    g.wall(0, 4.95, 10, 5.05)
    g.door(2.5, 4.9, 3.4, 5.1)
    g.door(7.5, 4.9, 8.4, 5.1)
    g.wall(5.95, 0, 6.05, 5.0)
    g.door(5.9, 1.5, 6.1, 2.4)

    objects = [
        # bedroom 1
        obj("bed_1", "bed", rect(0.2, 7.9, 1.8, 9.8)),
        obj("bedside_lamp_1", "bedside lamp", rect(1.95, 9.35, 2.3, 9.75), "elevated"),
        obj("cradle_1", "cradle", rect(3.8, 8.6, 4.6, 9.4)),
        obj("wardrobe_1", "wardrobe", rect(3.6, 6.7, 4.8, 7.2)),
        # bedroom 2
        obj("buddha_statue_1", "buddha statue", rect(5.3, 9.3, 5.7, 9.7)),
        obj("plant_1", "plant", rect(6.8, 9.4, 7.2, 9.8)),
        obj("desk_1", "desk", rect(8.6, 8.8, 9.8, 9.5)),
        obj("beanbag_1", "beanbag", rect(8.6, 7.0, 9.4, 7.8)),
        # living room
        obj("sofa_1", "sofa", rect(0.3, 0.3, 2.3, 1.1)),
        obj("coffee_table_1", "coffee table", rect(0.9, 2.0, 1.9, 2.6)),
        obj("television_1", "television", rect(0.5, 4.6, 1.9, 4.85), "elevated"),
        obj("plant_2", "plant", rect(5.3, 0.3, 5.7, 0.7)),
        obj("bookshelf_1", "bookshelf", rect(4.0, 4.5, 5.5, 4.9)),
        # kitchen
        obj("counter_1", "counter", rect(6.3, 0.2, 9.8, 0.8)),
        obj("oven_1", "oven", rect(9.2, 2.0, 9.8, 2.7)),
        obj("fridge_1", "fridge", rect(9.2, 3.8, 9.8, 4.6)),
        obj("bar_stool_1", "bar stool", rect(7.3, 2.6, 7.7, 3.0)),
        # everyday clutter, so views differ from room to room
        obj("dresser_1", "dresser", rect(0.2, 6.7, 1.2, 7.1)),
        obj("laundry_basket_1", "laundry basket", rect(2.8, 6.75, 3.2, 7.15)),
        obj("toy_box_1", "toy box", rect(2.6, 9.4, 3.1, 9.8)),
        obj("office_chair_1", "office chair", rect(8.9, 8.2, 9.3, 8.6)),
        obj("bookshelf_2", "bookshelf", rect(5.2, 6.7, 6.4, 7.0)),
        obj("floor_lamp_1", "floor lamp", rect(9.5, 6.7, 9.8, 7.0)),
        obj("guitar_1", "guitar", rect(7.8, 9.55, 8.2, 9.85)),
        obj("armchair_1", "armchair", rect(3.0, 0.3, 3.8, 1.0)),
        obj("side_table_1", "side table", rect(2.5, 0.3, 2.85, 0.65)),
        obj("dining_table_1", "dining table", rect(3.6, 2.4, 4.8, 3.2)),
        obj("dining_chair_1", "dining chair", rect(3.2, 2.6, 3.5, 2.9)),
        obj("dining_chair_2", "dining chair", rect(4.9, 2.6, 5.2, 2.9)),
        obj("floor_lamp_2", "floor lamp", rect(0.3, 3.6, 0.6, 3.9)),
        obj("shoe_rack_1", "shoe rack", rect(0.2, 5.15, 1.0, 5.4)),
        obj("coat_rack_1", "coat rack", rect(9.5, 5.9, 9.8, 6.3)),
        obj("trash_can_1", "trash can", rect(6.3, 4.4, 6.6, 4.7)),
        obj("plant_3", "plant", rect(9.45, 1.0, 9.8, 1.35)),
    ]
    folder = root / "house2br"
    folder.mkdir(parents=True, exist_ok=True)
    g.save(folder, "house2br")
    world = {
        "name": "house2br",
        "grid": "house2br.yaml",
        "start": [3.0, 5.75, 0.0],
        "objects": objects,
        "events": [],
    }
    (folder / "house2br.json").write_text(json.dumps(world, indent=2) + "\n")

    queries = ["bedside lamp", "cradle", "television", "beanbag", "oven", "buddha statue",
               "bar stool", "coffee table"]
    scenarios = [{"id": q.replace(" ", "_"), "query": q} for q in queries]
    for q in ["oven", "coffee table", "beanbag"]:
        scenarios.append({
            "id": q.replace(" ", "_") + "_occluded",
            "query": q,
            "tags": ["occlusion"],
            "events": [{"at": "query", "action": "occlude", "label": q}],
        })
    suite = {
        "world": "house2br.json",
        "modes": ["frontier", "vlpg", "vlpg+center", "full"],
        "seeds": [0, 1, 2, 3, 4],
        "scenarios": scenarios,
    }
    (folder / "suite.json").write_text(json.dumps(suite, indent=2) + "\n")


def minimal(root):
    g = Grid(4.0, 4.0)
    g.outline()
    folder = root / "minimal"
    folder.mkdir(parents=True, exist_ok=True)
    g.save(folder, "minimal")
    world = {
        "name": "minimal",
        "grid": "minimal.yaml",
        "start": [1.0, 1.0, 0.0],
        "objects": [obj("chair_1", "chair", rect(2.8, 2.8, 3.3, 3.3))],
        "events": [],
    }
    (folder / "minimal.json").write_text(json.dumps(world, indent=2) + "\n")
    suite = {
        "world": "minimal.json",
        "modes": ["frontier", "vlpg", "vlpg+center", "full"],
        "seeds": [0, 1],
        "scenarios": [{"id": "chair", "query": "chair"}],
    }
    (folder / "suite.json").write_text(json.dumps(suite, indent=2) + "\n")


if __name__ == "__main__":
    root = pathlib.Path(__file__).resolve().parent.parent / "worlds"
    house2br(root)
    minimal(root)
