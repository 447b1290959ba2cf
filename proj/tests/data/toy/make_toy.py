"""Regenerates the toy fixture: 4 taste groups of 8 items, users favouring one group.

The knowledge graph ties each group together (genre, artist, similarity) and adds a
noisy tag relation plus a rare one so the relation histogram has a long tail.
"""
import random

rng = random.Random(20231015)
GROUPS, PER_GROUP, USERS = 4, 8, 40
items = list(range(GROUPS * PER_GROUP))
group_of = {i: i // PER_GROUP for i in items}

with open("interactions.tsv", "w") as f:
    for u in range(USERS):
        g = u % GROUPS
        mine = rng.sample([i for i in items if group_of[i] == g], 6)
        mine.append(rng.choice([i for i in items if group_of[i] != g]))
        for i in sorted(mine):
            f.write(f"{1000 + u}\t{i}\t{rng.randint(1, 5)}\n")

triples = []
for i in items:
    g = group_of[i]
    triples.append((i, 10, 500 + g))                       # has_genre
    triples.append((i, 11, 600 + 2 * g + (i % 2)))          # by_artist
for g in range(GROUPS):
    members = [i for i in items if group_of[i] == g]
    for a, b in zip(members, members[1:]):
        triples.append((a, 12, b))                          # similar_to
for _ in range(12):
    triples.append((rng.choice(items), 13, 700 + rng.randrange(10)))  # tagged (noise)
triples.append((0, 14, 800))                                # rare relation
triples.append((9, 14, 800))

with open("kg.tsv", "w") as f:
    for h, r, t in triples:
        f.write(f"{h}\t{r}\t{t}\n")
