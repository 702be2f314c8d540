from enum import Enum


class Strategy(str, Enum):
    """Estrategias de continuación entre chunks"""
    NAIVE = "naive"  # Muestreo FM sin referencia
    ONESHOT = "oneshot"  # Clamp del prefijo solo en la inicialización
    RTC_SOFT = "rtc_soft"  # Guía por paso solo en inferencia (modelo vanilla)
    RTC_TRAIN = "rtc_train"  # Prefijo duro en entrenamiento e inferencia
    LEGATO = "legato"  # Guía por paso con campo de velocidad reformado


class StrategyFamily(str, Enum):
    """Familia de entrenamiento de un checkpoint"""
    VANILLA = "vanilla"  # omega = 0, objetivo A - eps
    LEGATO = "legato"  # (d, r) aleatorios, objetivo reformado
    RTC_TRAIN = "rtc_train"  # Prefijo duro, pérdida solo fuera del prefijo
    ONESHOT = "oneshot"  # FM desde el ruido con prefijo guiado


class TaskName(str, Enum):
    """Tareas sintéticas disponibles"""
    BIMODAL_REACH = "bimodal_reach"
    OSCILLATING_POUR = "oscillating_pour"


class Activation(str, Enum):
    """Activación de las capas ocultas"""
    TANH = "tanh"
    IDENTITY = "identity"  # Red lineal (chequeo de gradiente exacto)


class ArtifactKind(str, Enum):
    """Tipos de artefactos persistidos"""
    DATASET = "dataset"
    CHECKPOINT = "checkpoint"
    TRACE = "trace"
    METRICS = "metrics"


class CutoffRule(str, Enum):
    """Regla para la frecuencia de corte adaptativa de SPARC"""
    FIRST_BELOW = "first_below"  # Menor frecuencia bajo el umbral (por defecto)
    LAST_ABOVE = "last_above"  # Mayor frecuencia aún sobre el umbral


# Qué familias de checkpoint acepta cada estrategia
STRATEGY_FAMILIES = {
    Strategy.NAIVE: (StrategyFamily.VANILLA,),
    Strategy.RTC_SOFT: (StrategyFamily.VANILLA,),
    Strategy.ONESHOT: (StrategyFamily.VANILLA, StrategyFamily.ONESHOT),
    Strategy.RTC_TRAIN: (StrategyFamily.RTC_TRAIN,),
    Strategy.LEGATO: (StrategyFamily.LEGATO,),
}
