import math

# === 基础配置 ===
# 所有可调参数的默认值；命令行参数会覆盖这里的设置

# 随机种子：未指定 --seed 时先读环境变量，再退回默认值
SEED_ENV_VAR = "OSCILSWARM_SEED"
DEFAULT_SEED = 0

# 每个 (优化器, 函数) 的重复运行次数
DEFAULT_RUNS = 50

# 粒子数（HOPSO 与 PSO 共用）
DEFAULT_PARTICLES = 20

# HOPSO 参数：c1=c2=ω=1, t_ul=2π, m=2.05；阻尼由缩放因子 s 推出 λ = s·N/B
HOPSO_C1 = 1.0
HOPSO_C2 = 1.0
HOPSO_OMEGA = 1.0
HOPSO_T_UL = 2.0 * math.pi
HOPSO_M = 2.05
HOPSO_SCALE = 10.0

# 收缩因子 PSO 参数
PSO_C1 = 2.05
PSO_C2 = 2.05
PSO_CHI = 0.7298

# 差分进化参数（rand/1/bin）
DE_POP_PER_DIM = 15
DE_MIN_POPULATION = 4
DE_MUTATION = (0.5, 1.0)  # 每代在该区间内抖动 F
DE_CROSSOVER = 0.7
DE_POLISH = True

# 各测试函数的评估预算（函数评估次数），未列出的使用 DEFAULT_BUDGET
DEFAULT_BUDGET = 10000
FUNCTION_BUDGETS = {
    "beale": 1000,
    "goldstein-price": 1000,
    "sphere": 1000,
}

# 箱线图离群点判定：1.5·IQR
IQR_WHISKER = 1.5

# 奇异值扫描（r ∈ [0, 2]）的默认采样点数及默认 χ、c
SWEEP_SAMPLES = 200
DYNAMICS_CHI = 0.729
DYNAMICS_C = 2.05

# 默认对比的优化器
DEFAULT_OPTIMIZERS = ("hopso", "pso", "de")

# 目录
RESULTS_DIR = "results"
LOG_DIR = "logs"
