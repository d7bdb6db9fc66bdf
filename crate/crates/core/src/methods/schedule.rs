use crate::error::{Result, WrError};

/// Ordering of Dirichlet and Neumann roles across subdomains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arrangement {
    /// Left-to-right sweep.
    A1,
    /// Red-black: odd subdomains Dirichlet, even ones Neumann.
    A2,
    /// Middle subdomain first, then outward pairs.
    A3,
}

impl Arrangement {
    pub fn name(self) -> &'static str {
        match self {
            Arrangement::A1 => "A1",
            Arrangement::A2 => "A2",
            Arrangement::A3 => "A3",
        }
    }
}

/// Boundary condition a subdomain solve uses on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Physical boundary data.
    Physical,
    /// Current interface iterate.
    Dirichlet,
    /// Flux from the neighbour solved earlier in the same iteration.
    Neumann,
}

/// One subdomain solve; `subdomain` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Task {
    pub subdomain: usize,
    pub left: Role,
    pub right: Role,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub stages: Vec<Vec<Task>>,
}

impl Schedule {
    /// Stage contents as 1-based subdomain numbers.
    pub fn stage_indices(&self) -> Vec<Vec<usize>> {
        self.stages
            .iter()
            .map(|s| s.iter().map(|t| t.subdomain + 1).collect())
            .collect()
    }

    pub fn task(&self, subdomain: usize) -> Option<&Task> {
        self.stages.iter().flatten().find(|t| t.subdomain == subdomain)
    }

    /// Stage number of each subdomain.
    pub fn stage_of(&self, subdomain: usize) -> Option<usize> {
        self.stages
            .iter()
            .position(|s| s.iter().any(|t| t.subdomain == subdomain))
    }

    /// For interface `j` (between `j` and `j + 1`): `(dirichlet_side, neumann_side)`.
    pub fn interface_sides(&self, j: usize) -> (usize, usize) {
        let left = self.task(j).expect("scheduled");
        if left.right == Role::Neumann {
            (j + 1, j)
        } else {
            (j, j + 1)
        }
    }
}

pub fn arrangement_schedule(n: usize, arrangement: Arrangement) -> Result<Schedule> {
    if n < 2 {
        return Err(WrError::UnsupportedCount(n));
    }
    let outer = |i: usize, left_inner: Role, right_inner: Role| Task {
        subdomain: i,
        left: if i == 0 { Role::Physical } else { left_inner },
        right: if i == n - 1 { Role::Physical } else { right_inner },
    };
    let stages = match arrangement {
        Arrangement::A1 => (0..n)
            .map(|i| {
                let left = if i == 0 { Role::Physical } else { Role::Neumann };
                vec![outer(i, left, Role::Dirichlet)]
            })
            .collect(),
        Arrangement::A2 => {
            let odd = (0..n)
                .step_by(2)
                .map(|i| outer(i, Role::Dirichlet, Role::Dirichlet))
                .collect();
            let even = (1..n)
                .step_by(2)
                .map(|i| outer(i, Role::Neumann, Role::Neumann))
                .collect();
            vec![odd, even]
        }
        Arrangement::A3 => {
            // the first 2m+1 subdomains form the symmetric part
            let odd = if n % 2 == 1 { n } else { n - 1 };
            let mid = odd / 2;
            let mut stages = vec![vec![outer(mid, Role::Dirichlet, Role::Dirichlet)]];
            for j in 1..=mid {
                stages.push(vec![
                    outer(mid - j, Role::Dirichlet, Role::Neumann),
                    outer(mid + j, Role::Neumann, Role::Dirichlet),
                ]);
            }
            if odd < n {
                stages.push(vec![outer(n - 1, Role::Neumann, Role::Physical)]);
            }
            stages
        }
    };
    Ok(Schedule { stages })
}
