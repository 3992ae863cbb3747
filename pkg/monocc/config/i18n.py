"""Internationalization (i18n) module for monocc console messages."""

# Chinese messages
MESSAGES_ZH = {
    "command": "命令",
    "seed": "随机种子",
    "output_dir": "输出目录",
    "results": "结果",
    "written": "已写入",
    "failed": "执行失败",
    "synth": "生成合成数据",
    "render": "体渲染",
    "sample": "采样图像块",
    "align": "逆深度对齐",
    "loss": "损失计算",
    "eval_occ": "占据评估",
    "eval_depth": "深度评估",
    "bench_sampler": "采样器效率评测",
}

# English messages
MESSAGES_EN = {
    "command": "Command",
    "seed": "Seed",
    "output_dir": "Output",
    "results": "Results",
    "written": "Written",
    "failed": "Failed",
    "synth": "Synthesize fixture",
    "render": "Volume rendering",
    "sample": "Patch sampling",
    "align": "Inverse depth alignment",
    "loss": "Loss computation",
    "eval_occ": "Occupancy evaluation",
    "eval_depth": "Depth evaluation",
    "bench_sampler": "Sampler efficiency benchmark",
}


def get_messages(lang: str = "en") -> dict:
    """
    Get console messages dictionary by language.

    Args:
        lang: Language code, 'cn' for Chinese, 'en' for English.

    Returns:
        Dictionary of console messages.
    """
    if lang == "cn":
        return MESSAGES_ZH
    return MESSAGES_EN

