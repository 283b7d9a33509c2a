from typing import Dict, Hashable, Iterable, List


class UnionFind:
    """Disjoint sets with union by rank and path compression."""

    def __init__(self, X: Iterable[Hashable]):
        self.parent = {x: x for x in X}
        self.rank = {x: 0 for x in self.parent}

    def find(self, x):
        y = self.parent[x]
        if self.parent[y] != y:
            y = self.parent[x] = self.find(y)
        return y

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x

    def classes(self) -> List[List]:
        """Blocks ordered by their least member, members in increasing order."""
        blocks: Dict[Hashable, List] = {}
        for x in sorted(self.parent):
            blocks.setdefault(self.find(x), []).append(x)
        return list(blocks.values())


def partition_index(classes: List[List[int]], n: int) -> List[int]:
    """Maps each element 0..n-1 to the position of its block."""
    index = [-1] * n
    for position, block in enumerate(classes):
        for x in block:
            index[x] = position
    return index
