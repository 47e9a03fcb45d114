import numpy as np

from rpwmetric.util.utils import FLOW_EPS


class TransportNetwork:
    """
    Residual network of the bipartite transportation problem between the atoms
    of two distributions: source atoms u_i with supply mu_i, target atoms v_j
    with demand nu_j, arcs u_i -> v_j of cost costs[i, j], and a sink t fed by
    every v_j. The network keeps its flow between calls, so mass can be pushed
    incrementally: one augmenting path at a time with `augment`, or
    threshold by threshold with `max_flow`.
    """
    def __init__(self, supply, demand, costs):
        """
        :param supply: source masses (n,)
        :param demand: target masses (m,)
        :param costs: arc costs (n, m), non-negative (p-th powers for the profile)
        """
        self.supply = np.array(supply, dtype=np.float64)
        self.demand = np.array(demand, dtype=np.float64)
        self.costs = np.asarray(costs, dtype=np.float64)
        n, m = self.costs.shape
        if self.supply.shape != (n,) or self.demand.shape != (m,):
            raise ValueError('supply/demand do not match a {}x{} cost matrix'.format(n, m))
        self.flow = np.zeros((n, m))
        self.transported = 0.0
        # node potentials; reduced costs c + pi[tail] - pi[head] stay >= 0
        self.pi_u = np.zeros(n)
        self.pi_v = np.zeros(m)
        self.pi_t = 0.0

    @property
    def shape(self):
        return self.costs.shape

    def _shortest_path(self):
        """
        Dijkstra on reduced costs from every unsaturated source atom to t.
        Ties are popped as t first, then source atoms before target atoms,
        lowest index first.

        :return: (dist_u, dist_v, dist_t, parent_u, parent_v, parent_t), or None if t is unreachable
        """
        n, m = self.shape
        dist_u = np.where(self.supply > FLOW_EPS, 0.0, np.inf)
        dist_v = np.full(m, np.inf)
        dist_t = np.inf
        done_u = np.zeros(n, dtype=bool)
        done_v = np.zeros(m, dtype=bool)
        # -1 in parent_u marks a path start
        parent_u = np.full(n, -1, dtype=np.int64)
        parent_v = np.full(m, -1, dtype=np.int64)
        parent_t = -1
        while True:
            cand_u = np.where(done_u, np.inf, dist_u)
            cand_v = np.where(done_v, np.inf, dist_v)
            iu = int(np.argmin(cand_u))
            jv = int(np.argmin(cand_v))
            du, dv = cand_u[iu], cand_v[jv]
            if dist_t <= min(du, dv) and parent_t >= 0:
                break
            if np.isinf(du) and np.isinf(dv):
                return None
            if du <= dv:
                done_u[iu] = True
                reduced = np.maximum(self.costs[iu, :] + self.pi_u[iu] - self.pi_v, 0.0)
                nd = du + reduced
                better = ~done_v & (nd < dist_v)
                dist_v[better] = nd[better]
                parent_v[better] = iu
            else:
                done_v[jv] = True
                if self.demand[jv] > FLOW_EPS:
                    nt = dv + max(self.pi_v[jv] - self.pi_t, 0.0)
                    if nt < dist_t:
                        dist_t = nt
                        parent_t = jv
                back = self.flow[:, jv] > FLOW_EPS
                if np.any(back):
                    reduced = np.maximum(-self.costs[:, jv] + self.pi_v[jv] - self.pi_u, 0.0)
                    nd = dv + reduced
                    better = back & ~done_u & (nd < dist_u)
                    dist_u[better] = nd[better]
                    parent_u[better] = jv
        return dist_u, dist_v, dist_t, parent_u, parent_v, parent_t

    def _trace(self, parent_u, parent_v, end):
        """
        walk an augmenting path backwards from target atom `end`

        :return: list of forward arcs, list of backward arcs, start atom
        """
        forward, backward = [], []
        j = end
        while True:
            i = int(parent_v[j])
            forward.append((i, j))
            prev = int(parent_u[i])
            if prev < 0:
                return forward, backward, i
            backward.append((i, prev))
            j = prev

    def _push(self, forward, backward, start, end, limit):
        amount = min(limit, self.supply[start], self.demand[end])
        for i, j in backward:
            amount = min(amount, self.flow[i, j])
        if amount <= 0:
            return 0.0
        for i, j in forward:
            self.flow[i, j] += amount
        for i, j in backward:
            self.flow[i, j] -= amount
            if self.flow[i, j] <= FLOW_EPS:
                self.flow[i, j] = 0.0
        self.supply[start] -= amount
        self.demand[end] -= amount
        self.transported += amount
        return float(amount)

    def augment(self, limit=np.inf):
        """
        Push flow along one cheapest augmenting path (successive shortest paths).
        Every unit pushed costs exactly the returned slope, and slopes are
        nondecreasing over successive calls.

        :param limit: most mass to push
        :return: (amount pushed, per-unit cost of the path), or None when no path is left
        """
        path = self._shortest_path()
        if path is None:
            return None
        dist_u, dist_v, dist_t, parent_u, parent_v, parent_t = path
        self.pi_u += np.minimum(dist_u, dist_t)
        self.pi_v += np.minimum(dist_v, dist_t)
        self.pi_t += dist_t
        forward, backward, start = self._trace(parent_u, parent_v, parent_t)
        amount = self._push(forward, backward, start, parent_t, limit)
        return amount, float(self.pi_t)

    def p_cost(self):
        """total cost of the current flow"""
        return float(np.sum(self.flow * self.costs))

    def _disc_path(self, allowed):
        """
        breadth-first augmenting path using forward arcs in `allowed`
        and backward arcs that carry flow
        """
        n, m = self.shape
        seen_u = self.supply > FLOW_EPS
        seen_v = np.zeros(m, dtype=bool)
        parent_u = np.full(n, -1, dtype=np.int64)
        parent_v = np.full(m, -1, dtype=np.int64)
        queue = [('u', i) for i in np.flatnonzero(seen_u)]
        head = 0
        while head < len(queue):
            side, idx = queue[head]
            head += 1
            if side == 'u':
                reach = allowed[idx, :] & ~seen_v
                for j in np.flatnonzero(reach):
                    seen_v[j] = True
                    parent_v[j] = idx
                    if self.demand[j] > FLOW_EPS:
                        return parent_u, parent_v, int(j)
                    queue.append(('v', j))
            else:
                reach = (self.flow[:, idx] > FLOW_EPS) & ~seen_u
                for i in np.flatnonzero(reach):
                    seen_u[i] = True
                    parent_u[i] = idx
                    queue.append(('u', i))
        return None

    def max_flow(self, allowed):
        """
        Grow the current flow to a maximum flow that only uses arcs in `allowed`.
        Masks must be passed in nested (growing) order, since flow already
        placed is kept.

        :param allowed: boolean (n, m) mask of usable arcs
        :return: total transported mass
        """
        allowed = np.asarray(allowed, dtype=bool)
        while True:
            path = self._disc_path(allowed)
            if path is None:
                return self.transported
            parent_u, parent_v, end = path
            forward, backward, start = self._trace(parent_u, parent_v, end)
            if self._push(forward, backward, start, end, np.inf) <= 0:
                return self.transported
