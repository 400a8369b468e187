import type { Pos, SynsetView } from "./types.js";

export interface TreeNode {
  synset: SynsetView;
  children: TreeNode[];
}

/** Build the three rooted trees from the flat /forest listing. */
export function buildTrees(synsets: SynsetView[]): Map<Pos, TreeNode> {
  const nodes = new Map<string, TreeNode>();
  for (const synset of synsets) {
    nodes.set(synset.id, { synset, children: [] });
  }
  const roots = new Map<Pos, TreeNode>();
  for (const node of nodes.values()) {
    const parentId = node.synset.parent;
    if (parentId === null) {
      roots.set(node.synset.pos, node);
    } else {
      const parent = nodes.get(parentId);
      if (!parent) throw new Error(`dangling parent ${parentId}`);
      parent.children.push(node);
    }
  }
  for (const node of nodes.values()) {
    node.children.sort(
      (a, b) =>
        a.synset.lemma.localeCompare(b.synset.lemma) ||
        a.synset.sense - b.synset.sense,
    );
  }
  return roots;
}

/**
 * Ids that stay visible under a lemma-prefix filter: every match plus all
 * of its ancestors (so the tree keeps its shape while collapsed branches
 * without matches disappear).  An empty prefix shows everything.
 */
export function visibleUnderPrefix(root: TreeNode, prefix: string): Set<string> {
  const visible = new Set<string>();
  const query = prefix.toLowerCase();

  function walk(node: TreeNode): boolean {
    let anyChild = false;
    for (const child of node.children) {
      anyChild = walk(child) || anyChild;
    }
    const matches = query === "" || node.synset.lemma.startsWith(query);
    if (matches || anyChild) {
      visible.add(node.synset.id);
      return true;
    }
    return false;
  }

  walk(root);
  return visible;
}
